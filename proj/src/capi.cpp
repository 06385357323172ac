#include "contracta.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "contracta/doeblin.hpp"
#include "contracta/hierarchy.hpp"
#include "contracta/io.hpp"
#include "contracta/lower_bounds.hpp"
#include "contracta/reductions.hpp"
#include "contracta/structure.hpp"

using nlohmann::json;
using namespace contracta;

struct ctr_channel {
  KrausChannel ch;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
ctr_status guard(F&& f) {
  try {
    return f();
  } catch (const io::ParseError& e) {
    set_error(e.what());
    return CTR_ERROR_PARSE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return CTR_ERROR_PARSE;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return CTR_ERROR_SOLVER;
  } catch (const std::exception& e) {
    set_error(e.what());
    return CTR_ERROR_INTERNAL;
  }
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

json hierarchy_result_json(const hierarchy::LevelResult& r) {
  json h;
  h["m"] = r.spec.m;
  h["k"] = r.spec.k;
  h["ppt"] = r.spec.ppt;
  h["psucc"] = r.psucc;
  if (r.spec.k == 2) {
    h["eta"] = r.eta;
    h["eta_raw"] = r.eta_raw;
    h["clipped"] = r.clipped;
  }
  h["status"] = r.status == sdp::SolveStatus::Optimal ? "optimal"
                : r.status == sdp::SolveStatus::MaxIterations ? "max-iterations"
                                                              : "numerical-failure";
  h["relative_gap"] = r.certificate.relative_gap;
  h["equality_residual"] = r.certificate.max_equality_residual;
  h["min_eigenvalue"] = r.certificate.min_x_eigenvalue;
  return h;
}

}  // namespace

extern "C" {

const char* ctr_version(void) { return "0.1.0"; }

const char* ctr_last_error(void) { return g_last_error.c_str(); }

void ctr_string_free(char* s) { delete[] s; }

ctr_status ctr_channel_from_json(const char* json_text, ctr_channel** out) {
  if (!json_text || !out) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    auto* h = new ctr_channel{io::channel_from_json(json_text)};
    channels::require_valid(h->ch);
    *out = h;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_channel_from_file(const char* path, ctr_channel** out) {
  if (!path || !out) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    auto* h = new ctr_channel{io::channel_from_file(path)};
    channels::require_valid(h->ch);
    *out = h;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_channel_gallery(const char* name, const double* params, int n_params,
                               int copies, ctr_channel** out) {
  if (!name || !out || (n_params > 0 && !params)) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    const std::string id(name);
    KrausChannel ch;
    if (id == "amplitude_damping") {
      if (n_params != 2) throw io::ParseError("amplitude_damping expects (p, eta)");
      ch = channels::gallery_amplitude_damping(params[0], params[1]);
    } else if (id == "depolarizing") {
      if (n_params != 1) throw io::ParseError("depolarizing expects (p)");
      ch = channels::gallery_depolarizing(params[0]);
    } else if (id == "counterexample") {
      if (n_params != 1) throw io::ParseError("counterexample expects (d)");
      ch = channels::gallery_counterexample(static_cast<int>(params[0]));
    } else {
      throw io::ParseError("unknown gallery channel \"" + id + "\"");
    }
    if (copies < 1) throw io::ParseError("copies must be >= 1");
    if (copies > 1) ch = channels::tensor_power(ch, copies);
    *out = new ctr_channel{std::move(ch)};
    return CTR_STATUS_OK;
  });
}

void ctr_channel_free(ctr_channel* ch) { delete ch; }

int ctr_channel_dim_in(const ctr_channel* ch) { return ch ? ch->ch.d_in : 0; }
int ctr_channel_dim_out(const ctr_channel* ch) { return ch ? ch->ch.d_out : 0; }
int ctr_channel_kraus_count(const ctr_channel* ch) {
  return ch ? static_cast<int>(ch->ch.kraus.size()) : 0;
}

ctr_status ctr_channel_to_json(const ctr_channel* ch, char** out_json) {
  if (!ch || !out_json) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    *out_json = dup_string(io::channel_to_json(ch->ch));
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_channel_validate(const ctr_channel* ch, double* tp_residual,
                                double* choi_min_eig) {
  if (!ch) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    const channels::Diagnostics d = channels::validate(ch->ch);
    if (tp_residual) *tp_residual = d.tp_residual;
    if (choi_min_eig) *choi_min_eig = d.choi_min_eigenvalue;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_doeblin(const ctr_channel* ch, int strict_choi_state, double* alpha,
                       double* eta_upper) {
  if (!ch || !alpha) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    doeblin::Options opts;
    opts.strict_choi_state = strict_choi_state != 0;
    const doeblin::DoeblinResult r = doeblin::doeblin_alpha(ch->ch, opts);
    if (r.status == sdp::SolveStatus::NumericalFailure)
      throw std::runtime_error("Doeblin SDP failed numerically");
    *alpha = r.alpha;
    if (eta_upper) *eta_upper = r.eta_upper;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_hierarchy_bound(const ctr_channel* ch, int k, int m, int ppt,
                               double* psucc_bound, double* eta_bound) {
  if (!ch || !psucc_bound) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    hierarchy::LevelSpec spec;
    spec.k = k;
    spec.m = m;
    spec.ppt = ppt != 0;
    const hierarchy::LevelResult r = hierarchy::solve_level(ch->ch, spec);
    if (r.status == sdp::SolveStatus::NumericalFailure)
      throw std::runtime_error("hierarchy SDP failed numerically");
    *psucc_bound = r.psucc;
    if (eta_bound) *eta_bound = r.eta;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_seesaw_eta(const ctr_channel* ch, int restarts, int max_iterations,
                          uint64_t seed, double* value) {
  if (!ch || !value) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    lb::SeesawOptions opts;
    if (restarts > 0) opts.restarts = restarts;
    if (max_iterations > 0) opts.max_iterations = max_iterations;
    opts.seed = seed;
    *value = lb::seesaw_eta(ch->ch, opts).value;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_psucc_seesaw(const ctr_channel* ch, int k, int restarts,
                            int max_iterations, uint64_t seed, double* value) {
  if (!ch || !value) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    lb::SeesawOptions opts;
    if (restarts > 0) opts.restarts = restarts;
    if (max_iterations > 0) opts.max_iterations = max_iterations;
    opts.seed = seed;
    *value = lb::psucc_seesaw(ch->ch, k, opts).value;
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_bound_report_json(const ctr_channel* ch, const char* opts_json,
                                 char** out_json) {
  if (!ch || !out_json) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    json opts = json::object();
    if (opts_json && *opts_json) {
      opts = json::parse(opts_json, nullptr, false);
      if (opts.is_discarded()) throw io::ParseError("invalid options JSON");
    }
    const int k = opts.value("k", 2);
    std::vector<int> levels = opts.value("levels", std::vector<int>{1});
    const bool ppt = opts.value("ppt", false);
    const int restarts = opts.value("restarts", 32);
    const std::uint64_t seed = opts.value("seed", 1ull);
    const bool strict = opts.value("strict_choi_state", false);
    const bool verify = opts.value("verify", false);

    json rep;
    rep["channel"] = {{"d_in", ch->ch.d_in},
                      {"d_out", ch->ch.d_out},
                      {"kraus_count", ch->ch.kraus.size()}};
    {
      const channels::Diagnostics d = channels::validate(ch->ch);
      rep["channel"]["tp_residual"] = d.tp_residual;
      rep["channel"]["choi_min_eigenvalue"] = d.choi_min_eigenvalue;
    }

    double best_upper = 1.0;
    {
      const double t0 = now_seconds();
      doeblin::Options dopts;
      dopts.strict_choi_state = strict;
      const doeblin::DoeblinResult r = doeblin::doeblin_alpha(ch->ch, dopts);
      rep["doeblin"] = {{"alpha", r.alpha},
                        {"eta_upper", r.eta_upper},
                        {"witness_slack", r.witness_slack},
                        {"relative_gap", r.certificate.relative_gap},
                        {"seconds", now_seconds() - t0}};
      if (verify) rep["doeblin"]["witness_recheck"] = r.witness_slack >= -1e-7;
      best_upper = std::min(best_upper, r.eta_upper);
    }

    rep["hierarchy"] = json::array();
    for (int m : levels) {
      const double t0 = now_seconds();
      hierarchy::LevelSpec spec;
      spec.k = k;
      spec.m = m;
      spec.ppt = ppt;
      const hierarchy::LevelResult r = hierarchy::solve_level(ch->ch, spec);
      json h = hierarchy_result_json(r);
      h["seconds"] = now_seconds() - t0;
      rep["hierarchy"].push_back(h);
      if (k == 2 && r.status != sdp::SolveStatus::NumericalFailure)
        best_upper = std::min(best_upper, r.eta);
    }

    double lower = 0.0;
    {
      const double t0 = now_seconds();
      lb::SeesawOptions sopts;
      sopts.restarts = restarts;
      sopts.seed = seed;
      const lb::SeesawWitness w = lb::seesaw_eta(ch->ch, sopts);
      lower = w.value;
      rep["seesaw"] = {{"value", w.value},
                       {"iterations", w.iterations},
                       {"restarts_used", w.restarts_used},
                       {"seconds", now_seconds() - t0}};
      if (verify) {
        const Matrix delta = w.u * w.u.adjoint() - w.v * w.v.adjoint();
        const double recheck =
            0.5 * la::hs_inner(delta, channels::adjoint_apply(ch->ch, w.x)).real();
        rep["seesaw"]["witness_recheck"] = std::abs(recheck - w.value) <= 1e-9;
        rep["seesaw"]["orthogonality"] = std::abs(w.u.adjoint().dot(w.v));
      }
    }

    rep["interval"] = {std::max(0.0, lower), std::min(1.0, best_upper)};
    *out_json = dup_string(rep.dump(2));
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_eta_one_report_json(const char* input_json, int restarts,
                                   uint64_t seed, char** out_json) {
  if (!input_json || !out_json) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    KrausChannel ch;
    json extra = json::object();
    if (io::looks_like_channel(input_json)) {
      ch = io::channel_from_json(input_json);
    } else {
      const structure::OperatorSubspace s = io::subspace_from_json(input_json);
      ch = structure::channel_from_operator_system(s);
      extra["from_operator_system"] = true;
      extra["subspace_dim"] = s.dim();
    }
    const structure::EtaOneReport r =
        structure::eta_one_report(ch, restarts > 0 ? restarts : 24, seed);
    json rep = extra;
    rep["verdict"] = r.verdict;
    rep["certified"] = r.certified;
    rep["rank_one_distance"] = r.rank_one_dist;
    rep["witness_trace_distance"] = r.witness_trace_distance;
    rep["l_sep_upper"] = r.l_sep_upper_value;
    rep["l_sep_lower_ppt"] = r.l_sep_lower_value;
    rep["seesaw_lower"] = r.seesaw_lower;
    rep["channel"] = {{"d_in", ch.d_in}, {"d_out", ch.d_out}};
    *out_json = dup_string(rep.dump(2));
    return CTR_STATUS_OK;
  });
}

ctr_status ctr_reduce_json(const char* instance_json, double alpha, int with_bounds,
                           char** out_json) {
  if (!instance_json || !out_json) {
    set_error("null argument");
    return CTR_ERROR_INVALID;
  }
  return guard([&] {
    const reductions::GrothendieckInstance inst =
        io::instance_from_json(instance_json);
    const reductions::ReductionOutput r = reductions::build_phi_alpha(
        inst, alpha > 0.0 ? std::optional<double>(alpha) : std::nullopt);
    json rep;
    rep["alpha"] = r.alpha;
    rep["alpha_max"] = r.alpha_max;
    rep["channel"] = json::parse(io::channel_to_json(r.channel));
    rep["d_in"] = r.channel.d_in;
    rep["d_out"] = r.channel.d_out;
    if (with_bounds) {
      lb::SeesawOptions sopts;
      const double lower = lb::seesaw_eta(r.channel, sopts).value;
      const double upper = hierarchy::eta_upper_bound(r.channel, 1, false);
      const reductions::NormIdentityReport nid =
          reductions::norm_identity_check(inst, r, lower, upper);
      rep["eta_lower"] = lower;
      rep["eta_upper"] = upper;
      rep["norm_independent"] = nid.norm_independent;
      rep["two_alpha_norm"] = nid.scaled_norm;
      rep["bracket_violation"] = nid.bracket_violation;
    }
    *out_json = dup_string(rep.dump(2));
    return CTR_STATUS_OK;
  });
}

}  // extern "C"
