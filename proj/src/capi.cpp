#include "sldisc/sldisc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "sldisc/commands.hpp"
#include "sldisc/config.hpp"
#include "sldisc/error.hpp"

struct sldisc_config {
  sldisc::RunConfig cfg;
};

struct sldisc_problem {
  sldisc::ProblemSpec spec;
  sldisc::EigenOptions eigen;
};

namespace {

thread_local std::string last_error;

sldisc_status fail(sldisc_status s, const std::string& what) {
  last_error = what;
  return s;
}

template <class F>
sldisc_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return SLDISC_OK;
  } catch (const sldisc::Error& e) {
    switch (e.kind()) {
      case sldisc::ErrorKind::domain: return fail(SLDISC_ERR_DOMAIN, e.what());
      case sldisc::ErrorKind::io: return fail(SLDISC_ERR_IO, e.what());
      case sldisc::ErrorKind::config: return fail(SLDISC_ERR_CONFIG, e.what());
    }
    return fail(SLDISC_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SLDISC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SLDISC_ERR_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* sldisc_last_error(void) { return last_error.c_str(); }

const char* sldisc_version(void) { return "1.0.0"; }

void sldisc_string_free(char* s) { std::free(s); }

sldisc_status sldisc_config_create(sldisc_config** out) {
  if (!out) return fail(SLDISC_ERR_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new sldisc_config{}; });
}

sldisc_status sldisc_config_parse(const char* text, sldisc_config** out) {
  if (!text || !out) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new sldisc_config{sldisc::parse_config(text)}; });
}

sldisc_status sldisc_config_load(const char* path, sldisc_config** out) {
  if (!path || !out) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new sldisc_config{sldisc::load_config(path)}; });
}

sldisc_status sldisc_config_set(sldisc_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] { sldisc::set_config_value(cfg->cfg, key, value); });
}

sldisc_status sldisc_config_echo(const sldisc_config* cfg, char** text) {
  if (!cfg || !text) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] { *text = duplicate(sldisc::format_config(cfg->cfg)); });
}

void sldisc_config_destroy(sldisc_config* cfg) { delete cfg; }

sldisc_status sldisc_run(const sldisc_config* cfg, const char* command, const char* out_dir,
                         char** report) {
  if (!cfg || !command || !out_dir) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string r = sldisc::run_command(cfg->cfg, command, out_dir);
    if (report) *report = duplicate(r);
  });
}

sldisc_status sldisc_problem_create(const sldisc_config* cfg, sldisc_problem** out) {
  if (!cfg || !out) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new sldisc_problem{sldisc::build_problem(cfg->cfg),
                              sldisc::pipeline_options(cfg->cfg).eigen};
  });
}

void sldisc_problem_destroy(sldisc_problem* p) { delete p; }

sldisc_status sldisc_problem_eigenvalues(const sldisc_problem* p, int n, long* indices,
                                         double* values) {
  if (!p || !values || n < 1) return fail(SLDISC_ERR_ARGUMENT, "invalid argument");
  return guarded([&] {
    const sldisc::Spectrum s = sldisc::eigenvalues(p->spec, n, p->eigen);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (indices) indices[i] = s.indices[i];
      values[i] = s.values[i];
    }
  });
}

sldisc_status sldisc_problem_char(const sldisc_problem* p, double lambda, double* value) {
  if (!p || !value) return fail(SLDISC_ERR_ARGUMENT, "null argument");
  return guarded([&] { *value = sldisc::char_delta(p->spec, lambda, p->eigen.ode); });
}

}  // extern "C"
