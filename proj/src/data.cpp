#include "mdl/data.hpp"

namespace mdl {

DataSequence DataSequence::categorical(std::vector<int> values, int arity) {
  if (arity < 1) throw InvalidInput("categorical arity must be at least 1");
  for (int v : values) {
    if (v < 0 || v >= arity) {
      throw InvalidInput("categorical value out of range for arity " +
                         std::to_string(arity));
    }
  }
  DataSequence d;
  d.kind_ = Kind::Categorical;
  d.arity_ = arity;
  d.cats_ = std::move(values);
  return d;
}

DataSequence DataSequence::bits(std::string_view s) {
  std::vector<int> v;
  v.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw InvalidInput("bit string may only contain 0 and 1");
    v.push_back(c - '0');
  }
  return categorical(std::move(v), 2);
}

DataSequence DataSequence::real(std::vector<double> values) {
  DataSequence d;
  d.kind_ = Kind::Real;
  d.arity_ = 0;
  d.reals_ = std::move(values);
  return d;
}

DataSequence DataSequence::regression(Eigen::MatrixXd x, Eigen::VectorXd y) {
  if (x.rows() != y.size()) {
    throw InvalidInput("design matrix rows must match response length");
  }
  DataSequence d;
  d.kind_ = Kind::Regression;
  d.arity_ = 0;
  d.x_ = std::move(x);
  d.y_ = std::move(y);
  return d;
}

std::size_t DataSequence::size() const {
  switch (kind_) {
    case Kind::Categorical: return cats_.size();
    case Kind::Real: return reals_.size();
    case Kind::Regression: return static_cast<std::size_t>(y_.size());
  }
  return 0;
}

DataSequence DataSequence::prefix(std::size_t len) const {
  if (len > size()) throw InvalidInput("prefix length exceeds sequence length");
  DataSequence d;
  d.kind_ = kind_;
  d.arity_ = arity_;
  switch (kind_) {
    case Kind::Categorical:
      d.cats_.assign(cats_.begin(), cats_.begin() + len);
      break;
    case Kind::Real:
      d.reals_.assign(reals_.begin(), reals_.begin() + len);
      break;
    case Kind::Regression:
      d.x_ = x_.topRows(len);
      d.y_ = y_.head(len);
      break;
  }
  return d;
}

DataSequence DataSequence::suffix(std::size_t from) const {
  if (from > size()) throw InvalidInput("suffix start exceeds sequence length");
  std::size_t len = size() - from;
  DataSequence d;
  d.kind_ = kind_;
  d.arity_ = arity_;
  switch (kind_) {
    case Kind::Categorical:
      d.cats_.assign(cats_.begin() + from, cats_.end());
      break;
    case Kind::Real:
      d.reals_.assign(reals_.begin() + from, reals_.end());
      break;
    case Kind::Regression:
      d.x_ = x_.bottomRows(len);
      d.y_ = y_.tail(len);
      break;
  }
  return d;
}

DataSequence DataSequence::appended_cat(int symbol) const {
  if (kind_ != Kind::Categorical) throw InvalidInput("appended_cat on non-categorical sequence");
  DataSequence d = *this;
  if (symbol < 0 || symbol >= arity_) throw InvalidInput("appended symbol out of range");
  d.cats_.push_back(symbol);
  return d;
}

DataSequence DataSequence::appended_real(double v) const {
  if (kind_ != Kind::Real) throw InvalidInput("appended_real on non-real sequence");
  DataSequence d = *this;
  d.reals_.push_back(v);
  return d;
}

}  // namespace mdl
