#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reglab/error.hpp"

namespace reglab {

// The accuracy schedule F: the fine approximation must be accurate to 1/F(M)
// where M bounds the complexity of the coarse one.
//
//   linear(a, b)          F(M) = a*M + b        (default a = b = 1)
//   polynomial(k)         F(M) = (M + 1)^k
//   paper_exponential(e)  F(M) = 2^(2M) / e^3
//   table(...)            step interpolation of (M, F) pairs
class GrowthFunction {
 public:
  enum class Kind { linear, polynomial, paper_exponential, table };

  static GrowthFunction linear(double slope = 1.0, double intercept = 1.0) {
    if (!(slope >= 0.0) || !(intercept > 0.0))
      throw InputError("growth linear: need slope >= 0 and intercept > 0");
    GrowthFunction g(Kind::linear);
    g.a_ = slope;
    g.b_ = intercept;
    return g;
  }

  static GrowthFunction polynomial(double degree) {
    if (!(degree > 0.0)) throw InputError("growth poly: degree must be > 0");
    GrowthFunction g(Kind::polynomial);
    g.a_ = degree;
    return g;
  }

  static GrowthFunction paper_exponential(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw InputError("growth paper-exp: epsilon must lie in (0,1]");
    GrowthFunction g(Kind::paper_exponential);
    g.a_ = epsilon;
    return g;
  }

  // Entries are (M, F(M)); sorted by M on construction. F is the value of the
  // last entry with key <= M, or the first value below the first key.
  static GrowthFunction table(std::vector<std::pair<double, double>> entries) {
    if (entries.empty()) throw InputError("growth table: no entries");
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!(entries[i].second > 0.0) || !std::isfinite(entries[i].second))
        throw InputError("growth table: values must be positive");
      if (i > 0 && entries[i].first == entries[i - 1].first)
        throw InputError("growth table: duplicate key");
      if (i > 0 && entries[i].second < entries[i - 1].second)
        throw InputError("growth table: values are not monotone");
    }
    GrowthFunction g(Kind::table);
    g.table_ = std::move(entries);
    return g;
  }

  static GrowthFunction table_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("growth table: cannot open " + path);
    std::vector<std::pair<double, double>> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      std::istringstream ls(line);
      double m, f;
      if (!(ls >> m)) continue;
      std::string extra;
      if (!(ls >> f) || (ls >> extra))
        throw InputError("growth table: malformed line " +
                         std::to_string(lineno));
      entries.emplace_back(m, f);
    }
    return table(std::move(entries));
  }

  // `linear` | `linear:<a>:<b>` | `poly:<k>` | `paper-exp` | `table:<path>`.
  // paper-exp takes its epsilon from the caller.
  static GrowthFunction parse(const std::string& spec, double epsilon) {
    auto number = [&](const std::string& s) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (...) {
        used = 0;
      }
      if (used == 0 || used != s.size())
        throw InputError("growth spec '" + spec + "': bad number '" + s + "'");
      return v;
    };
    if (spec == "linear") return linear();
    if (spec.rfind("linear:", 0) == 0) {
      const std::string rest = spec.substr(7);
      const auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw InputError("growth spec '" + spec + "': expected linear:<a>:<b>");
      return linear(number(rest.substr(0, colon)), number(rest.substr(colon + 1)));
    }
    if (spec.rfind("poly:", 0) == 0) return polynomial(number(spec.substr(5)));
    if (spec == "paper-exp") return paper_exponential(epsilon);
    if (spec.rfind("table:", 0) == 0) return table_from_file(spec.substr(6));
    throw InputError("growth spec '" + spec + "' not recognized");
  }

  Kind kind() const noexcept { return kind_; }

  // The epsilon a paper-exponential schedule was instantiated with.
  double epsilon() const noexcept { return kind_ == Kind::paper_exponential ? a_ : 0.0; }

  double operator()(double m) const {
    switch (kind_) {
      case Kind::linear:
        return a_ * m + b_;
      case Kind::polynomial:
        return std::pow(m + 1.0, a_);
      case Kind::paper_exponential:
        return std::exp2(2.0 * m) / (a_ * a_ * a_);
      case Kind::table: {
        auto it = std::upper_bound(
            table_.begin(), table_.end(), m,
            [](double v, const std::pair<double, double>& e) { return v < e.first; });
        if (it == table_.begin()) return table_.front().second;
        return std::prev(it)->second;
      }
    }
    return 0.0;
  }

  bool is_monotone_on(const std::vector<double>& args) const {
    std::vector<double> sorted = args;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if ((*this)(sorted[i]) < (*this)(sorted[i - 1])) return false;
    return true;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::linear: os << "linear:" << a_ << ":" << b_; break;
      case Kind::polynomial: os << "poly:" << a_; break;
      case Kind::paper_exponential: os << "paper-exp(" << a_ << ")"; break;
      case Kind::table: os << "table[" << table_.size() << "]"; break;
    }
    return os.str();
  }

 private:
  explicit GrowthFunction(Kind k) : kind_(k) {}

  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace reglab
