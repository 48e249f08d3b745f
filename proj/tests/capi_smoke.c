/* The header must compile as C and the library must link from C. */
#include <stdio.h>
#include <string.h>

#include "asf/asf.h"

int main(void) {
  asf_session* s = NULL;
  char* out = NULL;
  int ok;
  if (asf_session_create(&s) != ASF_OK) return 1;
  if (asf_parse_element(s, "sl2", "[[t^2,0],[0,-t^2]]", 5, &out) != ASF_OK) return 1;
  asf_free_string(out);
  if (asf_run(s, "nilint", "{\"group\":\"sl2\",\"label\":\"reg\",\"q\":[5]}", &out) != ASF_OK) return 1;
  ok = asf_result_pass(out);
  asf_free_string(out);
  if (asf_parse_element(s, "sl2", "[[1,0],[0,1]]", 5, &out) != ASF_E_NOT_IN_LIE_ALGEBRA) return 1;
  if (strlen(asf_last_error(s)) == 0) return 1;
  asf_session_destroy(s);
  printf("asf %s: %s\n", asf_version(), ok ? "ok" : "failed");
  return ok ? 0 : 1;
}
