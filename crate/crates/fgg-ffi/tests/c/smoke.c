/* Drives the library through its public header only. */
#include <stdio.h>
#include <string.h>

#include "fgg.h"

static const char *BOX =
    "package main\n"
    "type Any interface {}\n"
    "type Box[a Any] struct { value a }\n"
    "func (b Box[a]) Nest(n int) Any {\n"
    "  if (n > 0) { return Box[Box[a]]{b}.Nest(n - 1) } else { return b }\n"
    "}\n"
    "func main() { _ = Box[int]{0}.Nest(2) }\n";

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "line %d: %s\n", __LINE__, #cond); return 1; } } while (0)

int main(void) {
    FggProgram *src = NULL, *dict = NULL;
    char *value = NULL, *report = NULL;
    size_t steps = 0;

    CHECK(fgg_parse(BOX, FGG_LANGUAGE_FGG, &src) == FGG_STATUS_OK);
    CHECK(fgg_typecheck(src, NULL) == FGG_STATUS_OK);
    CHECK(fgg_translate(src, FGG_MODE_DICT, &dict) == FGG_STATUS_OK);
    CHECK(fgg_run(dict, 100000, &value, &steps) == FGG_STATUS_OK);
    CHECK(strstr(value, "Box{Box{Box{0,") == value);
    CHECK(steps > 0);
    CHECK(fgg_cosim(src, 500, &report) == FGG_STATUS_OK);
    CHECK(strstr(report, "\"both_sides_agree\":true") != NULL);

    FggProgram *bad = NULL;
    CHECK(fgg_parse("package main\nfunc main() { _ = }", FGG_LANGUAGE_FGG, &bad) == FGG_STATUS_PARSE_ERROR);
    CHECK(bad == NULL);
    CHECK(fgg_last_error() != NULL);

    fgg_string_free(value);
    fgg_string_free(report);
    fgg_program_free(dict);
    fgg_program_free(src);
    puts("ok");
    return 0;
}
