// Command-line front end. Talks to the library exclusively through the C API.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contracta.h"

using nlohmann::json;

namespace {

int exit_code_for(ctr_status st) {
  switch (st) {
    case CTR_STATUS_OK:
      return 0;
    case CTR_ERROR_PARSE:
    case CTR_ERROR_INVALID:
      return 2;
    default:
      return 3;
  }
}

[[noreturn]] void fail(ctr_status st) {
  std::cerr << "error: " << ctr_last_error() << "\n";
  std::exit(exit_code_for(st));
}

std::string read_file_or_die(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

int worker_count(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* cap = std::getenv("CONTRACTA_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return static_cast<int>(std::min<std::size_t>(n, jobs));
}

struct BoundArgs {
  std::string file;
  std::vector<int> levels{1};
  int k = 2;
  bool ppt = false;
  int restarts = 32;
  std::uint64_t seed = 1;
  bool strict_choi = false;
  bool verify = false;
  bool json_only = false;
};

int run_bound(const BoundArgs& a) {
  ctr_channel* ch = nullptr;
  ctr_status st = ctr_channel_from_json(read_file_or_die(a.file).c_str(), &ch);
  if (st != CTR_STATUS_OK) fail(st);

  json opts;
  opts["levels"] = a.levels;
  opts["k"] = a.k;
  opts["ppt"] = a.ppt;
  opts["restarts"] = a.restarts;
  opts["seed"] = a.seed;
  opts["strict_choi_state"] = a.strict_choi;
  opts["verify"] = a.verify;

  char* out = nullptr;
  st = ctr_bound_report_json(ch, opts.dump().c_str(), &out);
  if (st != CTR_STATUS_OK) {
    ctr_channel_free(ch);
    fail(st);
  }
  const json rep = json::parse(out);
  ctr_string_free(out);
  ctr_channel_free(ch);

  if (a.json_only) {
    std::cout << rep.dump(2) << "\n";
    return 0;
  }

  std::cout << "channel: d_in=" << rep["channel"]["d_in"]
            << " d_out=" << rep["channel"]["d_out"]
            << " kraus=" << rep["channel"]["kraus_count"] << "\n";
  std::printf("%-22s %12s %12s\n", "bound", "value", "seconds");
  std::printf("%-22s %12s %12s\n", "doeblin 1-alpha",
              fmt(rep["doeblin"]["eta_upper"].get<double>()).c_str(),
              fmt(rep["doeblin"]["seconds"].get<double>()).c_str());
  for (const json& h : rep["hierarchy"]) {
    std::string name = "sdp m=" + std::to_string(h["m"].get<int>());
    if (h["ppt"].get<bool>()) name += " ppt";
    const double v = h.contains("eta") ? h["eta"].get<double>() : h["psucc"].get<double>();
    std::printf("%-22s %12s %12s\n", name.c_str(), fmt(v).c_str(),
                fmt(h["seconds"].get<double>()).c_str());
  }
  std::printf("%-22s %12s %12s\n", "seesaw lower",
              fmt(rep["seesaw"]["value"].get<double>()).c_str(),
              fmt(rep["seesaw"]["seconds"].get<double>()).c_str());
  std::cout << "certified interval: [" << fmt(rep["interval"][0].get<double>())
            << ", " << fmt(rep["interval"][1].get<double>()) << "]\n";
  std::cout << rep.dump(2) << "\n";
  return 0;
}

struct SweepArgs {
  std::string gallery = "depolarizing";
  double eta = 0.8;       // amplitude damping only
  std::string grid = "0.1:0.9:9";
  int copies = 1;
  bool ppt = false;
  int restarts = 16;
  std::uint64_t seed = 1;
  std::string out_path;
};

int run_sweep(const SweepArgs& a) {
  if (a.gallery != "depolarizing" && a.gallery != "amplitude_damping") {
    std::cerr << "error: sweep supports depolarizing and amplitude_damping\n";
    return 2;
  }
  double lo = 0, hi = 0;
  int count = 0;
  if (std::sscanf(a.grid.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1) {
    std::cerr << "error: --grid expects start:stop:count\n";
    return 2;
  }

  std::vector<double> ps(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    ps[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(count - 1);

  struct Row {
    double p, doeblin, sdp1, sdp1_ppt, lower;
    ctr_status st = CTR_STATUS_OK;
  };
  std::vector<Row> rows(ps.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= ps.size()) return;
      Row& row = rows[i];
      row.p = ps[i];
      ctr_channel* ch = nullptr;
      ctr_status st;
      if (a.gallery == "amplitude_damping") {
        const double params[2] = {row.p, a.eta};
        st = ctr_channel_gallery("amplitude_damping", params, 2, a.copies, &ch);
      } else {
        st = ctr_channel_gallery("depolarizing", &row.p, 1, a.copies, &ch);
      }
      if (st != CTR_STATUS_OK) {
        row.st = st;
        return;
      }
      double alpha = 0, eta_up = 1, psucc = 0, eta1 = 1, eta1p = std::nan("");
      st = ctr_doeblin(ch, 0, &alpha, &eta_up);
      if (st == CTR_STATUS_OK) st = ctr_hierarchy_bound(ch, 2, 1, 0, &psucc, &eta1);
      if (st == CTR_STATUS_OK && a.ppt) {
        double ps2 = 0;
        st = ctr_hierarchy_bound(ch, 2, 1, 1, &ps2, &eta1p);
      }
      double lower = 0;
      if (st == CTR_STATUS_OK)
        st = ctr_seesaw_eta(ch, a.restarts, 0, a.seed + i, &lower);
      ctr_channel_free(ch);
      row.doeblin = eta_up;
      row.sdp1 = eta1;
      row.sdp1_ppt = eta1p;
      row.lower = lower;
      row.st = st;
    }
  };

  const int nthreads = worker_count(ps.size());
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  for (const Row& r : rows)
    if (r.st != CTR_STATUS_OK) {
      std::cerr << "error: sweep point p=" << r.p << ": " << ctr_last_error() << "\n";
      return exit_code_for(r.st);
    }

  std::ostringstream csv;
  csv << "p,doeblin,sdp1,sdp1_ppt,lower\n";
  for (const Row& r : rows)
    csv << fmt(r.p) << "," << fmt(r.doeblin) << "," << fmt(r.sdp1) << ","
        << fmt(r.sdp1_ppt) << "," << fmt(r.lower) << "\n";

  if (a.out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << a.out_path << "\n";
      return 2;
    }
    out << csv.str();
    std::cout << "wrote " << rows.size() << " rows to " << a.out_path << "\n";
  }
  return 0;
}

int run_check_eta_one(const std::string& file, int restarts, std::uint64_t seed) {
  char* out = nullptr;
  const ctr_status st =
      ctr_eta_one_report_json(read_file_or_die(file).c_str(), restarts, seed, &out);
  if (st != CTR_STATUS_OK) fail(st);
  const json rep = json::parse(out);
  ctr_string_free(out);
  std::cout << rep.dump(2) << "\n";
  std::cout << "verdict: " << rep["verdict"].get<std::string>() << "\n";
  return 0;
}

int run_reduce(const std::string& file, double alpha, bool bounds,
               const std::string& out_path) {
  char* out = nullptr;
  const ctr_status st = ctr_reduce_json(read_file_or_die(file).c_str(), alpha,
                                        bounds ? 1 : 0, &out);
  if (st != CTR_STATUS_OK) fail(st);
  json rep = json::parse(out);
  ctr_string_free(out);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    f << rep["channel"].dump(2) << "\n";
    rep["channel_file"] = out_path;
    rep.erase("channel");
  }
  std::cout << rep.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contracta: bounds on the trace-norm contraction of quantum channels"};
  app.require_subcommand(1);

  BoundArgs bound;
  CLI::App* cb = app.add_subcommand("bound", "bound a channel from a JSON file");
  cb->add_option("file", bound.file, "channel JSON file")->required();
  cb->add_option("--levels", bound.levels, "hierarchy levels to solve");
  cb->add_option("--k", bound.k, "number of messages");
  cb->add_flag("--ppt", bound.ppt, "add PPT constraints");
  cb->add_option("--restarts", bound.restarts, "see-saw restarts");
  cb->add_option("--seed", bound.seed, "random seed");
  cb->add_flag("--strict-choi-state", bound.strict_choi,
               "Doeblin program on the unit-trace Choi state");
  cb->add_flag("--verify", bound.verify, "recompute witness residuals");
  cb->add_flag("--json", bound.json_only, "print the JSON report only");

  SweepArgs sweep;
  CLI::App* cs = app.add_subcommand("sweep", "parameter sweep to CSV");
  cs->add_option("--gallery", sweep.gallery, "depolarizing or amplitude_damping");
  cs->add_option("--eta", sweep.eta, "amplitude damping eta");
  cs->add_option("--grid", sweep.grid, "parameter grid start:stop:count");
  cs->add_option("--copies", sweep.copies, "tensor copies of the channel");
  cs->add_flag("--ppt", sweep.ppt, "also solve the PPT-constrained level");
  cs->add_option("--restarts", sweep.restarts, "see-saw restarts");
  cs->add_option("--seed", sweep.seed, "random seed");
  cs->add_option("--out", sweep.out_path, "CSV output path (stdout when absent)");

  std::string ceo_file;
  int ceo_restarts = 24;
  std::uint64_t ceo_seed = 1;
  CLI::App* ce = app.add_subcommand("check-eta-one",
                                    "certify or refute eta = 1 for a channel "
                                    "or operator-system file");
  ce->add_option("file", ceo_file, "channel or subspace JSON file")->required();
  ce->add_option("--restarts", ceo_restarts, "rank-one search restarts");
  ce->add_option("--seed", ceo_seed, "random seed");

  std::string red_file, red_out;
  double red_alpha = 0.0;
  bool red_bounds = false;
  CLI::App* cr = app.add_subcommand("reduce",
                                    "build the channel of a Grothendieck instance");
  cr->add_option("file", red_file, "instance JSON file")->required();
  cr->add_option("--alpha", red_alpha, "shift weight (default 0.9 alpha_max)");
  cr->add_flag("--bounds", red_bounds, "also bound the emitted channel");
  cr->add_option("--out", red_out, "write the channel JSON here");

  CLI11_PARSE(app, argc, argv);

  if (cb->parsed()) return run_bound(bound);
  if (cs->parsed()) return run_sweep(sweep);
  if (ce->parsed()) return run_check_eta_one(ceo_file, ceo_restarts, ceo_seed);
  if (cr->parsed()) return run_reduce(red_file, red_alpha, red_bounds, red_out);
  return 0;
}
