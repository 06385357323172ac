#include "contracta/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace contracta {
namespace io {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON document");
  return j;
}

Matrix matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty())
    throw ParseError(std::string(what) + ": matrix must be a nonempty array of rows");
  const std::size_t nr = rows.size();
  const std::size_t nc = rows[0].is_array() ? rows[0].size() : 0;
  if (nc == 0) throw ParseError(std::string(what) + ": empty matrix row");
  Matrix m(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
  for (std::size_t r = 0; r < nr; ++r) {
    if (!rows[r].is_array() || rows[r].size() != nc)
      throw ParseError(std::string(what) + ": ragged matrix rows");
    for (std::size_t c = 0; c < nc; ++c) {
      const json& e = rows[r][c];
      if (e.is_number()) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ParseError(std::string(what) + ": entries must be numbers or [re, im]");
      }
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("missing numeric field \"") + key + "\"");
  return j[key].get<double>();
}

KrausChannel gallery_from_json(const json& j) {
  const std::string name = j["gallery"].get<std::string>();
  const json params = j.value("params", json::object());
  KrausChannel ch;
  if (name == "amplitude_damping") {
    ch = channels::gallery_amplitude_damping(require_number(params, "p"),
                                             require_number(params, "eta"));
  } else if (name == "depolarizing") {
    ch = channels::gallery_depolarizing(require_number(params, "p"));
  } else if (name == "counterexample") {
    ch = channels::gallery_counterexample(
        static_cast<int>(require_number(params, "d")));
  } else {
    throw ParseError("unknown gallery channel \"" + name + "\"");
  }
  const int copies = j.value("copies", 1);
  if (copies < 1) throw ParseError("copies must be >= 1");
  if (copies > 1) ch = channels::tensor_power(ch, copies);
  return ch;
}

}  // namespace

KrausChannel channel_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.is_object()) throw ParseError("channel document must be an object");
  try {
    if (j.contains("gallery")) return gallery_from_json(j);
    if (!j.contains("d_in") || !j.contains("d_out") || !j.contains("kraus"))
      throw ParseError("channel needs d_in, d_out and kraus (or a gallery)");
    KrausChannel ch;
    ch.d_in = j["d_in"].get<int>();
    ch.d_out = j["d_out"].get<int>();
    if (!j["kraus"].is_array() || j["kraus"].empty())
      throw ParseError("kraus must be a nonempty array");
    for (const json& k : j["kraus"]) ch.kraus.push_back(matrix_from_json(k, "kraus"));
    for (const Matrix& k : ch.kraus)
      if (k.rows() != ch.d_out || k.cols() != ch.d_in)
        throw ParseError("kraus operator shape disagrees with d_out x d_in");
    return ch;
  } catch (const json::exception& e) {
    throw ParseError(std::string("channel parse failure: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("channel parse failure: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KrausChannel channel_from_file(const std::string& path) {
  return channel_from_json(read_file(path));
}

std::string channel_to_json(const KrausChannel& ch) {
  json j;
  j["d_in"] = ch.d_in;
  j["d_out"] = ch.d_out;
  j["kraus"] = json::array();
  for (const Matrix& k : ch.kraus) j["kraus"].push_back(matrix_to_json(k));
  return j.dump(2);
}

structure::OperatorSubspace subspace_from_json(const std::string& text) {
  json j = parse(text);
  try {
    if (!j.contains("p") || !j.contains("q") || !j.contains("basis"))
      throw ParseError("subspace needs p, q and basis");
    const int p = j["p"].get<int>();
    const int q = j["q"].get<int>();
    std::vector<Matrix> span;
    for (const json& m : j["basis"]) span.push_back(matrix_from_json(m, "basis"));
    return structure::subspace_from_span(p, q, span);
  } catch (const json::exception& e) {
    throw ParseError(std::string("subspace parse failure: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("subspace parse failure: ") + e.what());
  }
}

std::string subspace_to_json(const structure::OperatorSubspace& s) {
  json j;
  j["p"] = s.p;
  j["q"] = s.q;
  j["basis"] = json::array();
  for (const Matrix& b : s.basis) j["basis"].push_back(matrix_to_json(b));
  return j.dump(2);
}

reductions::GrothendieckInstance instance_from_json(const std::string& text) {
  json j = parse(text);
  try {
    reductions::GrothendieckInstance inst;
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "hermitian")
      inst.variant = reductions::Variant::Hermitian;
    else if (variant == "commutative")
      inst.variant = reductions::Variant::Commutative;
    else
      throw ParseError("variant must be \"hermitian\" or \"commutative\"");
    if (!j.contains("operators") || !j["operators"].is_array() || j["operators"].empty())
      throw ParseError("instance needs a nonempty operators array");
    for (const json& op : j["operators"]) {
      if (inst.variant == reductions::Variant::Hermitian) {
        inst.operators.push_back(matrix_from_json(op, "operators"));
      } else {
        if (!op.is_array()) throw ParseError("commutative operators must be vectors");
        RVector v(static_cast<Eigen::Index>(op.size()));
        for (std::size_t r = 0; r < op.size(); ++r) {
          if (!op[r].is_number())
            throw ParseError("commutative vectors must hold real numbers");
          v(static_cast<Eigen::Index>(r)) = op[r].get<double>();
        }
        inst.vectors.push_back(v);
      }
    }
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance parse failure: ") + e.what());
  }
}

bool looks_like_channel(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  return j.contains("kraus") || j.contains("gallery");
}

}  // namespace io
}  // namespace contracta
