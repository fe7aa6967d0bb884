//! Line/indent bookkeeping shared by the two canonical printers.

pub(crate) struct Out {
    buf: String,
    depth: usize,
}

impl Out {
    pub(crate) fn new() -> Self {
        Out { buf: String::new(), depth: 0 }
    }

    pub(crate) fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.buf.push('\t');
        }
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    pub(crate) fn blank(&mut self) {
        self.buf.push('\n');
    }

    pub(crate) fn indent(&mut self) {
        self.depth += 1;
    }

    pub(crate) fn dedent(&mut self) {
        self.depth -= 1;
    }

    pub(crate) fn finish(self) -> String {
        self.buf
    }
}

pub(crate) fn comma_list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}
