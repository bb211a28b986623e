#include <stdio.h>
#include <string.h>

#include "dualwalk.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
              dw_last_error());                                       \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  const int64_t k[] = {6, 3};
  const int64_t m[] = {8, 5, 1};
  const char *expected[] = {"7/12", "3/20", "4/15"};
  DwWeight *w = NULL;
  DwState *s = NULL;
  DwRng *rng = NULL;

  CHECK(dw_weight_new(k, 2, &w) == DW_STATUS_OK);
  CHECK(dw_state_new(w, m, 3, &s) == DW_STATUS_OK);
  for (size_t i = 1; i <= 3; i++) {
    char *pq = NULL;
    double v = 0;
    CHECK(dw_a_sq(s, i, &pq, &v) == DW_STATUS_OK);
    CHECK(strcmp(pq, expected[i - 1]) == 0);
    dw_string_free(pq);
  }

  size_t identities = 0;
  CHECK(dw_factor_check(w, 10, &identities) == DW_STATUS_OK);
  CHECK(identities == 30);

  const int64_t bad[] = {8, 2, 1};
  DwState *invalid = NULL;
  CHECK(dw_state_new(w, bad, 3, &invalid) == DW_STATUS_INVALID_STATE);
  CHECK(strlen(dw_last_error()) > 0);

  CHECK(dw_rng_new(7, 0, &rng) == DW_STATUS_OK);
  for (int step = 0; step < 100; step++) {
    DwState *next = NULL;
    CHECK(dw_full_step(s, rng, DW_MECHANISM_URN, &next) == DW_STATUS_OK);
    dw_state_free(s);
    s = next;
  }
  int64_t out[3];
  CHECK(dw_state_entries(s, out, 3) == DW_STATUS_OK);
  CHECK(out[0] + out[1] + out[2] == 14);

  char *card = NULL;
  CHECK(dw_class_cardinality(1, 3, &card) == DW_STATUS_OK);
  CHECK(strcmp(card, "240") == 0);
  dw_string_free(card);

  dw_rng_free(rng);
  dw_state_free(s);
  dw_weight_free(w);
  printf("ok\n");
  return 0;
}
