#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "asf/asf.h"
#include "commands.hpp"
#include "exactnum.hpp"
#include "json.hpp"
#include "liemodel.hpp"
#include "rootdata.hpp"

struct asf_session {
  std::string last_error;
};

namespace {

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Errc values map to 1 + their position
template <class Fn>
int guarded(asf_session* s, Fn&& fn) {
  if (!s) return ASF_E_NULL_POINTER;
  try {
    fn();
    s->last_error.clear();
    return ASF_OK;
  } catch (const asf::Error& e) {
    s->last_error = e.what();
    return 1 + static_cast<int>(e.code());
  } catch (const std::exception& e) {
    s->last_error = std::string("internal error: ") + e.what();
    return ASF_E_INTERNAL;
  }
}

int null_arg(asf_session* s, const char* what) {
  if (s) s->last_error = std::string("null argument: ") + what;
  return ASF_E_NULL_POINTER;
}

}  // namespace

extern "C" {

const char* asf_version(void) { return ASF_VERSION; }

const char* asf_status_name(int status) {
  if (status == ASF_OK) return "Ok";
  if (status == ASF_E_NULL_POINTER) return "NullPointer";
  if (status == ASF_E_INTERNAL) return "Internal";
  if (status >= 1 && status <= ASF_E_INVALID_ARGUMENT) return asf::errc_name(static_cast<asf::Errc>(status - 1));
  return "Unknown";
}

int asf_session_create(asf_session** out) {
  if (!out) return ASF_E_NULL_POINTER;
  *out = new (std::nothrow) asf_session;
  return *out ? ASF_OK : ASF_E_INTERNAL;
}

void asf_session_destroy(asf_session* session) { delete session; }

const char* asf_last_error(const asf_session* session) { return session ? session->last_error.c_str() : "null session"; }

int asf_run(asf_session* session, const char* command, const char* config_json, char** result) {
  if (!command || !config_json || !result) return null_arg(session, "command, config or result");
  *result = nullptr;
  return guarded(session, [&] {
    auto r = asf::run_command(command, config_json);
    *result = dup(asf::result_to_json(r));
  });
}

int asf_result_pass(const char* result) {
  if (!result) return 0;
  try {
    auto j = nlohmann::json::parse(result);
    return j.value("pass", false) ? 1 : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

int asf_canonical_config(asf_session* session, const char* command, const char* config_json, char** out) {
  if (!command || !config_json || !out) return null_arg(session, "command, config or out");
  *out = nullptr;
  return guarded(session, [&] { *out = dup(asf::canonical_config(command, config_json)); });
}

int asf_parse_element(asf_session* session, const char* group, const char* expr, int q, char** out) {
  if (!group || !expr || !out) return null_arg(session, "group, expr or out");
  *out = nullptr;
  return guarded(session, [&] {
    const auto& G = asf::GroupModel::get(asf::parse_group(group));
    const asf::Fq& F = asf::Fq::of_order(q);
    G.check_characteristic(F.p());
    *out = dup(asf::parse_lie_element(G, expr, F).str());
  });
}

void asf_free_string(char* s) { std::free(s); }

}  // extern "C"
