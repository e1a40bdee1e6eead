#ifndef SLDISC_H
#define SLDISC_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum sldisc_status {
  SLDISC_OK = 0,
  SLDISC_ERR_DOMAIN = 1,     /* invalid mathematical input or a failed numerical stage */
  SLDISC_ERR_IO = 2,         /* file system failure */
  SLDISC_ERR_CONFIG = 3,     /* malformed configuration or input file */
  SLDISC_ERR_ARGUMENT = 4,   /* null handle or out-of-range argument */
  SLDISC_ERR_INTERNAL = 5    /* unexpected exception */
} sldisc_status;

typedef struct sldisc_config sldisc_config;
typedef struct sldisc_problem sldisc_problem;

/* Message of the last failed call on this thread; empty after a success. */
const char* sldisc_last_error(void);
const char* sldisc_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
void sldisc_string_free(char* s);

sldisc_status sldisc_config_create(sldisc_config** out);
sldisc_status sldisc_config_parse(const char* text, sldisc_config** out);
sldisc_status sldisc_config_load(const char* path, sldisc_config** out);
/* One `key = value` assignment with the same checks as a config file. */
sldisc_status sldisc_config_set(sldisc_config* cfg, const char* key, const char* value);
sldisc_status sldisc_config_echo(const sldisc_config* cfg, char** text);
void sldisc_config_destroy(sldisc_config* cfg);

/* Runs a subcommand (forward, invert, invert-partial, roundtrip, stability,
   basis-check), writing its files into out_dir. `report` may be NULL. */
sldisc_status sldisc_run(const sldisc_config* cfg, const char* command, const char* out_dir,
                         char** report);

/* The boundary value problem described by a config. */
sldisc_status sldisc_problem_create(const sldisc_config* cfg, sldisc_problem** out);
void sldisc_problem_destroy(sldisc_problem* p);
/* First n positive eigenvalue square roots with their indices. */
sldisc_status sldisc_problem_eigenvalues(const sldisc_problem* p, int n, long* indices,
                                         double* values);
/* The characteristic function at lambda. */
sldisc_status sldisc_problem_char(const sldisc_problem* p, double lambda, double* value);

#ifdef __cplusplus
}
#endif

#endif
