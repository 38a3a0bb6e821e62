#include "rau/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rau/error.hpp"

namespace rau::ad {
namespace {

Tape& tape_of(Var a) {
  if (!a.valid()) throw std::logic_error("autodiff: operand is not recorded on a tape");
  return *a.tape();
}

Tape& common_tape(Var a, Var b) {
  if (a.tape() != b.tape()) throw std::logic_error("autodiff: operands live on different tapes");
  return tape_of(a);
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (!same_shape(a, b)) throw ShapeError(std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

template <typename F>
Var unary_map(Var a, F f, Tape::BackwardFn backward) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y.values()[i] = f(x.values()[i]);
  return t.record(std::move(y), {a.id()}, std::move(backward));
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  Matrix out = rau::matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t, const Matrix& g) {
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += rau::matmul_nt(g, tp.value(ib));
    if (tp.requires_grad(ib)) tp.grad_buffer(ib) += rau::matmul_tn(tp.value(ia), g);
  });
}

Var add(Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape("add", a.value(), b.value());
  Matrix out = a.value();
  out += b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t, const Matrix& g) {
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += g;
    if (tp.requires_grad(ib)) tp.grad_buffer(ib) += g;
  });
}

Var add_row(Var a, Var row) {
  Tape& t = common_tape(a, row);
  const Matrix& x = a.value();
  const Matrix& r = row.value();
  if (r.rows() != 1 || r.cols() != x.cols())
    throw ShapeError("add_row: row " + shape_str(r) + " does not broadcast over " + shape_str(x));
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += r(0, j);
  }
  const std::size_t ia = a.id(), ir = row.id();
  return t.record(std::move(out), {ia, ir}, [ia, ir](Tape& tp, std::size_t, const Matrix& g) {
    if (tp.requires_grad(ia)) tp.grad_buffer(ia) += g;
    if (tp.requires_grad(ir)) {
      Matrix& gr = tp.grad_buffer(ir);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gr(0, j) += g(i, j);
    }
  });
}

Var elementwise_mul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape("elementwise_mul", a.value(), b.value());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= b.value().values()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t, const Matrix& g) {
    const Matrix& va = tp.value(ia);
    const Matrix& vb = tp.value(ib);
    if (tp.requires_grad(ia)) {
      auto ga = tp.grad_buffer(ia).values();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g.values()[i] * vb.values()[i];
    }
    if (tp.requires_grad(ib)) {
      auto gb = tp.grad_buffer(ib).values();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g.values()[i] * va.values()[i];
    }
  });
}

Var scale(Var a, double factor) {
  const std::size_t ia = a.id();
  return unary_map(a, [factor](double v) { return v * factor; },
                   [ia, factor](Tape& tp, std::size_t, const Matrix& g) {
                     auto ga = tp.grad_buffer(ia).values();
                     for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += factor * g.values()[i];
                   });
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id();
  return t.record(Matrix(1, 1, s), {ia}, [ia](Tape& tp, std::size_t, const Matrix& g) {
    auto ga = tp.grad_buffer(ia).values();
    const double gv = g(0, 0);
    for (double& v : ga) v += gv;
  });
}

Var sum_squares(Var a) {
  Tape& t = tape_of(a);
  double s = 0.0;
  for (double v : a.value().values()) s += v * v;
  const std::size_t ia = a.id();
  return t.record(Matrix(1, 1, s), {ia}, [ia](Tape& tp, std::size_t, const Matrix& g) {
    auto ga = tp.grad_buffer(ia).values();
    auto x = tp.value(ia).values();
    const double gv = 2.0 * g(0, 0);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv * x[i];
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  Tape& t = tape_of(parts.front());
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  for (const Var& p : parts) {
    if (p.tape() != &t) throw std::logic_error("concat_cols: operands live on different tapes");
    if (p.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
    ids.push_back(p.id());
    offsets.push_back(cols);
    cols += p.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Matrix& v = parts[k].value();
    for (std::size_t i = 0; i < rows; ++i)
      std::copy(v.row(i).begin(), v.row(i).end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(offsets[k]));
  }
  auto inputs = ids;
  return t.record(std::move(out), std::move(inputs),
                  [ids, offsets](Tape& tp, std::size_t, const Matrix& g) {
                    for (std::size_t k = 0; k < ids.size(); ++k) {
                      if (!tp.requires_grad(ids[k])) continue;
                      Matrix& gk = tp.grad_buffer(ids[k]);
                      for (std::size_t i = 0; i < gk.rows(); ++i)
                        for (std::size_t j = 0; j < gk.cols(); ++j) gk(i, j) += g(i, offsets[k] + j);
                    }
                  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (begin + count > x.cols()) throw ShapeError("slice_cols: range exceeds " + shape_str(x));
  Matrix out(x.rows(), count);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = x(i, begin + j);
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, begin](Tape& tp, std::size_t, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) ga(i, begin + j) += g(i, j);
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (begin + count > x.rows()) throw ShapeError("slice_rows: range exceeds " + shape_str(x));
  std::vector<double> vals(x.values().begin() + static_cast<std::ptrdiff_t>(begin * x.cols()),
                           x.values().begin() + static_cast<std::ptrdiff_t>((begin + count) * x.cols()));
  const std::size_t ia = a.id();
  return t.record(Matrix(count, x.cols(), std::move(vals)), {ia},
                  [ia, begin](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix& ga = tp.grad_buffer(ia);
                    for (std::size_t i = 0; i < g.rows(); ++i)
                      for (std::size_t j = 0; j < g.cols(); ++j) ga(begin + i, j) += g(i, j);
                  });
}

Var gather_rows(Var a, std::span<const Index> rows) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= x.rows()) throw ShapeError("gather_rows: row index out of range");
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), out.row(i).begin());
  }
  const std::size_t ia = a.id();
  std::vector<Index> idx(rows.begin(), rows.end());
  return t.record(std::move(out), {ia}, [ia, idx = std::move(idx)](Tape& tp, std::size_t, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto dst = ga.row(idx[i]);
      auto src = g.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  });
}

Var relu(Var a) {
  const std::size_t ia = a.id();
  return unary_map(a, [](double v) { return v > 0.0 ? v : 0.0; },
                   [ia](Tape& tp, std::size_t, const Matrix& g) {
                     auto x = tp.value(ia).values();
                     auto ga = tp.grad_buffer(ia).values();
                     for (std::size_t i = 0; i < ga.size(); ++i)
                       if (x[i] > 0.0) ga[i] += g.values()[i];
                   });
}

Var leaky_relu(Var a, double slope) {
  const std::size_t ia = a.id();
  return unary_map(a, [slope](double v) { return v > 0.0 ? v : slope * v; },
                   [ia, slope](Tape& tp, std::size_t, const Matrix& g) {
                     auto x = tp.value(ia).values();
                     auto ga = tp.grad_buffer(ia).values();
                     for (std::size_t i = 0; i < ga.size(); ++i)
                       ga[i] += (x[i] > 0.0 ? 1.0 : slope) * g.values()[i];
                   });
}

Var sigmoid(Var a) {
  const std::size_t ia = a.id();
  return unary_map(
      a,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [ia](Tape& tp, std::size_t self, const Matrix& g) {
        auto y = tp.value(self).values();
        auto ga = tp.grad_buffer(ia).values();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g.values()[i] * y[i] * (1.0 - y[i]);
      });
}

Var row_softmax_masked(Var a, const Mask& mask) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (mask.rows != x.rows() || mask.cols != x.cols() || mask.bits.size() != x.size())
    throw ShapeError("row_softmax_masked: mask shape does not match " + shape_str(x));
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (mask(i, j)) mx = std::max(mx, x(i, j));
    if (mx == -std::numeric_limits<double>::infinity())
      throw std::logic_error("row_softmax_masked: row " + std::to_string(i) + " is fully masked");
    double z = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (!mask(i, j)) continue;
      y(i, j) = std::exp(x(i, j) - mx);
      z += y(i, j);
    }
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (mask(i, j)) y(i, j) /= z;
  }
  const std::size_t ia = a.id();
  return t.record(std::move(y), {ia}, [ia, mask](Tape& tp, std::size_t self, const Matrix& g) {
    const Matrix& y = tp.value(self);
    Matrix& ga = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j)
        if (mask(i, j)) dot += y(i, j) * g(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j)
        if (mask(i, j)) ga(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
}

Var row_l2_normalize(Var a, double eps) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix y = x;
  std::vector<double> norms(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (double v : x.row(i)) s += v * v;
    norms[i] = std::sqrt(s);
    if (norms[i] < eps) continue;
    for (double& v : y.row(i)) v /= norms[i];
  }
  const std::size_t ia = a.id();
  return t.record(std::move(y), {ia},
                  [ia, eps, norms = std::move(norms)](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& y = tp.value(self);
                    Matrix& ga = tp.grad_buffer(ia);
                    for (std::size_t i = 0; i < y.rows(); ++i) {
                      auto gi = g.row(i);
                      auto dst = ga.row(i);
                      if (norms[i] < eps) {
                        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += gi[j];
                        continue;
                      }
                      auto yi = y.row(i);
                      double dot = 0.0;
                      for (std::size_t j = 0; j < yi.size(); ++j) dot += yi[j] * gi[j];
                      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += (gi[j] - yi[j] * dot) / norms[i];
                    }
                  });
}

Var mean_rows_masked(Var x, const Mask& mask) {
  Tape& t = tape_of(x);
  const Matrix& v = x.value();
  if (mask.cols != v.rows() || mask.bits.size() != mask.rows * mask.cols)
    throw ShapeError("mean_rows_masked: mask must have one column per input row");
  Matrix out(mask.rows, v.cols());
  std::vector<double> counts(mask.rows, 0.0);
  for (std::size_t i = 0; i < mask.rows; ++i) {
    for (std::size_t j = 0; j < mask.cols; ++j) {
      if (!mask(i, j)) continue;
      counts[i] += 1.0;
      auto dst = out.row(i);
      auto src = v.row(j);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    if (counts[i] > 0.0)
      for (double& d : out.row(i)) d /= counts[i];
  }
  const std::size_t ix = x.id();
  return t.record(std::move(out), {ix},
                  [ix, mask, counts = std::move(counts)](Tape& tp, std::size_t, const Matrix& g) {
                    Matrix& gx = tp.grad_buffer(ix);
                    for (std::size_t i = 0; i < mask.rows; ++i) {
                      if (counts[i] == 0.0) continue;
                      for (std::size_t j = 0; j < mask.cols; ++j) {
                        if (!mask(i, j)) continue;
                        auto dst = gx.row(j);
                        auto src = g.row(i);
                        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k] / counts[i];
                      }
                    }
                  });
}

Var spmm(const CsrMatrix& a, Var x) {
  Tape& t = tape_of(x);
  Matrix out = rau::spmm(a, x.value());
  const std::size_t ix = x.id();
  const CsrMatrix* pa = &a;
  return t.record(std::move(out), {ix}, [ix, pa](Tape& tp, std::size_t, const Matrix& g) {
    rau::spmm_transposed_accumulate(*pa, g, tp.grad_buffer(ix));
  });
}

Var edge_softmax(const CsrMatrix& pattern, Var src, Var dst, double slope) {
  Tape& t = common_tape(src, dst);
  const std::size_t n = pattern.rows();
  if (pattern.cols() != n || src.rows() != n || dst.rows() != n || src.cols() != 1 || dst.cols() != 1)
    throw ShapeError("edge_softmax: scores must be n x 1 for an n x n pattern");
  const auto ptr = pattern.row_ptr();
  const auto idx = pattern.col_idx();
  const Matrix& s = src.value();
  const Matrix& d = dst.value();
  Matrix alpha(pattern.nnz(), 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (ptr[i] == ptr[i + 1])
      throw std::logic_error("edge_softmax: node " + std::to_string(i) + " has an empty attention row");
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) {
      const double z = s(i, 0) + d(idx[e], 0);
      alpha(e, 0) = z > 0.0 ? z : slope * z;
      mx = std::max(mx, alpha(e, 0));
    }
    double total = 0.0;
    for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) {
      alpha(e, 0) = std::exp(alpha(e, 0) - mx);
      total += alpha(e, 0);
    }
    for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) alpha(e, 0) /= total;
  }
  const std::size_t is = src.id(), id = dst.id();
  const CsrMatrix* pp = &pattern;
  return t.record(std::move(alpha), {is, id},
                  [is, id, pp, slope](Tape& tp, std::size_t self, const Matrix& g) {
                    const Matrix& a = tp.value(self);
                    const Matrix& sv = tp.value(is);
                    const Matrix& dv = tp.value(id);
                    const bool want_s = tp.requires_grad(is);
                    const bool want_d = tp.requires_grad(id);
                    Matrix* gs = want_s ? &tp.grad_buffer(is) : nullptr;
                    Matrix* gd = want_d ? &tp.grad_buffer(id) : nullptr;
                    const auto ptr = pp->row_ptr();
                    const auto idx = pp->col_idx();
                    for (std::size_t i = 0; i < pp->rows(); ++i) {
                      double dot = 0.0;
                      for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) dot += a(e, 0) * g(e, 0);
                      for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) {
                        const double z = sv(i, 0) + dv(idx[e], 0);
                        const double dz = a(e, 0) * (g(e, 0) - dot) * (z > 0.0 ? 1.0 : slope);
                        if (gs) (*gs)(i, 0) += dz;
                        if (gd) (*gd)(idx[e], 0) += dz;
                      }
                    }
                  });
}

Var spmm_edge(const CsrMatrix& pattern, Var edge_values, Var x) {
  Tape& t = common_tape(edge_values, x);
  if (edge_values.rows() != pattern.nnz() || edge_values.cols() != 1)
    throw ShapeError("spmm_edge: edge values must be nnz x 1");
  if (pattern.cols() != x.rows()) throw ShapeError("spmm_edge: pattern/operand dimension mismatch");
  CsrMatrix weighted(pattern.rows(), pattern.cols(),
                     std::vector<std::size_t>(pattern.row_ptr().begin(), pattern.row_ptr().end()),
                     std::vector<Index>(pattern.col_idx().begin(), pattern.col_idx().end()),
                     std::vector<double>(edge_values.value().values().begin(), edge_values.value().values().end()));
  Matrix out = rau::spmm(weighted, x.value());
  const std::size_t iv = edge_values.id(), ix = x.id();
  const CsrMatrix* pp = &pattern;
  return t.record(std::move(out), {iv, ix}, [iv, ix, pp](Tape& tp, std::size_t, const Matrix& g) {
    const auto ptr = pp->row_ptr();
    const auto idx = pp->col_idx();
    const Matrix& w = tp.value(iv);
    const Matrix& xv = tp.value(ix);
    const std::size_t k = xv.cols();
    if (tp.requires_grad(iv)) {
      Matrix& gw = tp.grad_buffer(iv);
      for (std::size_t i = 0; i < pp->rows(); ++i) {
        const double* gi = g.data() + i * k;
        for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) {
          const double* xj = xv.data() + static_cast<std::size_t>(idx[e]) * k;
          double dot = 0.0;
          for (std::size_t c = 0; c < k; ++c) dot += gi[c] * xj[c];
          gw(e, 0) += dot;
        }
      }
    }
    if (tp.requires_grad(ix)) {
      Matrix& gx = tp.grad_buffer(ix);
      for (std::size_t i = 0; i < pp->rows(); ++i) {
        const double* gi = g.data() + i * k;
        for (std::size_t e = ptr[i]; e < ptr[i + 1]; ++e) {
          double* dst = gx.data() + static_cast<std::size_t>(idx[e]) * k;
          const double we = w(e, 0);
          for (std::size_t c = 0; c < k; ++c) dst[c] += we * gi[c];
        }
      }
    }
  });
}

Var binary_cross_entropy(Var p, std::span<const double> targets) {
  Tape& t = tape_of(p);
  const Matrix& pv = p.value();
  if (pv.cols() != 1 || pv.rows() != targets.size() || targets.empty())
    throw ShapeError("binary_cross_entropy: expected m x 1 probabilities for m targets");
  const double m = static_cast<double>(targets.size());
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double y = targets[i];
    if (y != 0.0 && y != 1.0) throw ValidationError("binary_cross_entropy: targets must be 0 or 1");
    const double q = std::clamp(pv(i, 0), kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
  }
  const std::size_t ip = p.id();
  std::vector<double> y(targets.begin(), targets.end());
  return t.record(Matrix(1, 1, total / m), {ip}, [ip, y = std::move(y), m](Tape& tp, std::size_t, const Matrix& g) {
    const Matrix& pv = tp.value(ip);
    Matrix& gp = tp.grad_buffer(ip);
    const double scale = g(0, 0) / m;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double q = pv(i, 0);
      if (q < kProbabilityClamp || q > 1.0 - kProbabilityClamp) continue;
      gp(i, 0) -= scale * (y[i] / q - (1.0 - y[i]) / (1.0 - q));
    }
  });
}

}  // namespace rau::ad
