#pragma once

// JSON state/weight/result files and CSV output with a metadata header.

#include "kpart/dynamics.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kpart {

using json = nlohmann::json;

inline constexpr const char* version_string = "0.3.1";

class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  while (byte > 0 && std::isspace(static_cast<unsigned char>(text[byte - 1])) && (byte >= text.size() || std::isspace(static_cast<unsigned char>(text[byte])))) --byte;
  std::size_t line = 1, start = 0;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      start = i + 1;
    }
  }
  std::size_t end = text.find('\n', start);
  if (end == std::string::npos) end = text.size();
  std::ostringstream os;
  os << "line " << line << ", column " << (byte - start + 1) << ": " << text.substr(start, end - start);
  return os.str();
}

inline cplx to_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw parse_error("expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json from_complex(cplx z) { return json::array({z.real(), z.imag()}); }

inline CVector to_vector(const json& j, std::size_t expected) {
  if (!j.is_array()) throw parse_error("expected an array of complex numbers");
  if (j.size() != expected) {
    throw parse_error("expected " + std::to_string(expected) + " amplitudes, got " + std::to_string(j.size()));
  }
  CVector v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) v(static_cast<Eigen::Index>(i)) = to_complex(j[i]);
  return v;
}

}  // namespace detail

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("malformed JSON at ") + detail::line_context(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// {n, dims, kind, data}: pure data is the amplitude list, dense data the
/// row-major matrix (flat or nested rows), ensemble data a list of
/// {weight, amplitudes}.
inline DensityOperator state_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    Dims dims = j.contains("dims") ? j.at("dims").get<Dims>() : qubit_dims(n);
    if (static_cast<int>(dims.size()) != n) throw parse_error("dims length differs from n");
    const std::size_t d = total_dim(dims);
    const std::string kind = j.at("kind").get<std::string>();
    const json& data = j.at("data");
    if (kind == "pure") return DensityOperator::from_pure(PureState(dims, detail::to_vector(data, d)));
    if (kind == "dense") {
      CMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      if (data.is_array() && data.size() == d && d > 1 && data[0].is_array() && data[0].size() == d) {
        for (std::size_t r = 0; r < d; ++r) {
          const CVector row = detail::to_vector(data[r], d);
          m.row(static_cast<Eigen::Index>(r)) = row.transpose();
        }
      } else {
        const CVector flat = detail::to_vector(data, d * d);
        for (std::size_t r = 0; r < d; ++r) {
          m.row(static_cast<Eigen::Index>(r)) = flat.segment(static_cast<Eigen::Index>(r * d), static_cast<Eigen::Index>(d)).transpose();
        }
      }
      return DensityOperator::from_dense(dims, std::move(m));
    }
    if (kind == "ensemble") {
      std::vector<EnsembleMember> members;
      for (const auto& e : data) {
        members.push_back({e.at("weight").get<double>(),
                           std::make_shared<const PureState>(PureState(dims, detail::to_vector(e.at("amplitudes"), d))), 0});
      }
      return DensityOperator::from_ensemble(dims, std::move(members));
    }
    throw parse_error("unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid state file: ") + e.what());
  }
}

inline DensityOperator load_state(const std::string& path) {
  const std::string text = read_file(path);
  return state_from_json(parse_json_text(text));
}

inline json state_to_json(const PureState& psi) {
  json data = json::array();
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) data.push_back(detail::from_complex(psi.amplitudes()(i)));
  return {{"n", psi.n_parties()}, {"dims", psi.dims()}, {"kind", "pure"}, {"data", data}};
}

inline json state_to_json(const DensityOperator& rho) {
  json data = json::array();
  if (rho.is_dense()) {
    const CMatrix& m = rho.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(detail::from_complex(m(r, c)));
    }
    return {{"n", rho.n_parties()}, {"dims", rho.dims()}, {"kind", "dense"}, {"data", data}};
  }
  for (const auto& mem : rho.members()) {
    const CVector a = mem.amplitudes();
    json amps = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i) amps.push_back(detail::from_complex(a(i)));
    data.push_back({{"weight", mem.weight}, {"amplitudes", amps}});
  }
  return {{"n", rho.n_parties()}, {"dims", rho.dims()}, {"kind", "ensemble"}, {"data", data}};
}

inline json to_json(const WeightVector& w) { return {{"k", w.k}, {"n", w.n}, {"a", w.a}}; }

inline WeightVector weights_from_json(const json& j) {
  try {
    WeightVector w{j.at("k").get<int>(), j.at("n").get<int>(), j.at("a").get<std::vector<double>>()};
    w.validate();
    return w;
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid weight file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw parse_error(std::string("invalid weight file: ") + e.what());
  }
}

/// Bipartitions as sorted 1-based member lists.
inline json to_json(const Bipartition& bp) {
  json out = json::array();
  for (int m : bp.members()) out.push_back(m + 1);
  return out;
}

inline json to_json(const TauResult& r) {
  json contributions = json::array();
  for (const auto& [bp, v] : r.contributions) contributions.push_back({{"members", to_json(bp)}, {"value", v}});
  json factors = json::array();
  for (const auto* pv : {&r.probe.phi1, &r.probe.phi2}) {
    json copy = json::array();
    for (const auto& f : pv->factors()) {
      json local = json::array();
      for (Eigen::Index i = 0; i < f.size(); ++i) local.push_back(detail::from_complex(f(i)));
      copy.push_back(local);
    }
    factors.push_back(copy);
  }
  return {{"value", r.value},     {"f", r.f_value},       {"weights", to_json(r.weights)},
          {"angles", r.angles},   {"probe", factors},     {"contributions", contributions},
          {"evaluations", r.evaluations}};
}

inline const char* axis_name(Axis a) { return a == Axis::x ? "x" : a == Axis::y ? "y" : "z"; }

inline json to_json(const HamiltonianSpec& h) {
  json axes = json::array();
  for (const auto& bond : h.axes) {
    json b = json::array();
    for (Axis a : bond) b.push_back(axis_name(a));
    axes.push_back(b);
  }
  return {{"n", h.n},
          {"body", h.body},
          {"boundary", h.boundary == Boundary::open ? "open" : "periodic"},
          {"axes", axes},
          {"couplings", h.couplings},
          {"seed", h.seed}};
}

inline HamiltonianSpec hamiltonian_from_json(const json& j) {
  try {
    HamiltonianSpec h;
    h.n = j.at("n").get<int>();
    h.body = j.at("body").get<int>();
    const std::string b = j.at("boundary").get<std::string>();
    if (b != "open" && b != "periodic") throw parse_error("boundary must be open or periodic");
    h.boundary = b == "open" ? Boundary::open : Boundary::periodic;
    for (const auto& bond : j.at("axes")) {
      std::vector<Axis> a;
      for (const auto& s : bond) {
        const std::string name = s.get<std::string>();
        if (name == "x") a.push_back(Axis::x);
        else if (name == "y") a.push_back(Axis::y);
        else if (name == "z") a.push_back(Axis::z);
        else throw parse_error("unknown Pauli axis '" + name + "'");
      }
      h.axes.push_back(std::move(a));
    }
    h.couplings = j.at("couplings").get<std::vector<double>>();
    h.seed = j.value("seed", std::uint64_t{0});
    h.validate();
    return h;
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid Hamiltonian spec: ") + e.what());
  }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Comma-separated table with '#' metadata lines and 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const json& config, std::uint64_t seed) : os_(os) {
    os_ << "# kpart " << version_string << '\n';
    os_ << "# seed " << seed << '\n';
    os_ << "# config_hash " << hex64(fnv1a(config.dump())) << '\n';
    os_ << "# config " << config.dump() << '\n';
  }

  void header(const std::vector<std::string>& cols) { row_strings(cols); }

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((os_ << (first ? "" : ","), put(values), first = false), ...);
    os_ << '\n';
  }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

  void comment(const std::string& text) { os_ << "# " << text << '\n'; }

  static std::string format(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
  }

 private:
  void put(double v) { os_ << format(v); }
  void put(int v) { os_ << v; }
  void put(long v) { os_ << v; }
  void put(std::size_t v) { os_ << v; }
  void put(const std::string& s) { os_ << s; }
  void put(const char* s) { os_ << s; }

  std::ostream& os_;
};

}  // namespace kpart
