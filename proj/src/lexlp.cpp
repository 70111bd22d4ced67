#include "dopt/lexlp.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>

namespace dopt {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr double kActiveTol = 1e-7;

// Dense two-phase tableau simplex over the standard form
//   min c'x'  s.t.  Abar x' = bbar, x' >= 0,
// built from A x <= b with x = u - v and slack variables. Artificial
// columns stay in the tableau (banned from entering in phase two) so dual
// values can be read off their reduced costs.
class Simplex {
 public:
  Simplex(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
          const Eigen::VectorXd& b)
      : n_(static_cast<int>(c.size())), k_(static_cast<int>(b.size())), c_(c),
        A0_(A), b0_(b) {
    ncols_ = 2 * n_ + 2 * k_;
    tab_ = Eigen::MatrixXd::Zero(k_, ncols_);
    rhs_ = Eigen::VectorXd::Zero(k_);
    sigma_.assign(k_, 1.0);
    basis_.resize(k_);
    for (int r = 0; r < k_; ++r) {
      sigma_[r] = (b(r) >= 0.0) ? 1.0 : -1.0;
      tab_.block(r, 0, 1, n_) = sigma_[r] * A.row(r);
      tab_.block(r, n_, 1, n_) = -sigma_[r] * A.row(r);
      tab_(r, 2 * n_ + r) = sigma_[r];            // slack
      tab_(r, 2 * n_ + k_ + r) = 1.0;             // artificial
      rhs_(r) = sigma_[r] * b(r);
      basis_[r] = 2 * n_ + k_ + r;
    }
  }

  SolveReport run() {
    SolveReport rep;
    // Phase one: minimize the sum of artificials.
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(ncols_);
    cost1.tail(k_).setOnes();
    const int phase1 = iterate(cost1, /*ban_artificials=*/false);
    if (phase1 < 0) {
      rep.status = SolveStatus::MaxIter;
      return rep;
    }
    const double infeas = current_value(cost1);
    if (infeas > 1e-7 * (1.0 + rhs_.cwiseAbs().maxCoeff())) {
      rep.status = SolveStatus::Infeasible;
      rep.certificate = farkas_certificate(cost1);
      return rep;
    }
    drive_out_artificials();

    // Phase two on the real objective.
    Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(ncols_);
    cost2.head(n_) = c_;
    cost2.segment(n_, n_) = -c_;
    const int phase2 = iterate(cost2, /*ban_artificials=*/true);
    if (phase2 < 0) {
      rep.status = SolveStatus::MaxIter;
      return rep;
    }
    if (phase2 == 1) {
      rep.status = SolveStatus::Unbounded;
      return rep;
    }
    refine_basic_solution();
    rep.x = extract_x();
    rep.value = c_.dot(rep.x);
    rep.multipliers = extract_multipliers(cost2);
    rep.status = SolveStatus::Optimal;
    rep.residual = 0.0;
    return rep;
  }

  // Lexicographic run: phase one for feasibility, then a single phase two
  // whose objective is the stack of cost vectors compared lexicographically
  // in the reduced costs. Avoids the sequential value-fixing cuts entirely,
  // so every basis stays a well-conditioned subset of the original rows.
  SolveReport run_lex(const std::vector<Eigen::VectorXd>& objs) {
    SolveReport rep;
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(ncols_);
    cost1.tail(k_).setOnes();
    const int phase1 = iterate(cost1, /*ban_artificials=*/false);
    if (phase1 < 0) {
      rep.status = SolveStatus::MaxIter;
      return rep;
    }
    const double infeas = current_value(cost1);
    if (infeas > 1e-7 * (1.0 + rhs_.cwiseAbs().maxCoeff())) {
      rep.status = SolveStatus::Infeasible;
      rep.certificate = farkas_certificate(cost1);
      return rep;
    }
    drive_out_artificials();

    const int m = static_cast<int>(objs.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, ncols_);
    for (int i = 0; i < m; ++i) {
      C.block(i, 0, 1, n_) = objs[i].transpose();
      C.block(i, n_, 1, n_) = -objs[i].transpose();
    }
    const int phase2 = iterate_lex(C);
    if (phase2 < 0) {
      rep.status = SolveStatus::MaxIter;
      return rep;
    }
    if (phase2 == 1) {
      rep.status = SolveStatus::Unbounded;
      return rep;
    }
    refine_basic_solution();
    rep.x = extract_x();
    rep.value = objs.empty() ? 0.0 : objs[0].dot(rep.x);
    rep.status = SolveStatus::Optimal;
    rep.residual = 0.0;
    return rep;
  }

 private:
  // Bland's rule iteration. Returns 0 = optimal, 1 = unbounded, -1 = stalled.
  int iterate(const Eigen::VectorXd& cost, bool ban_artificials) {
    Eigen::VectorXd reduced = reduced_costs(cost);
    const long max_pivots = 2000L * (k_ + n_ + 10);
    for (long pivots = 0; pivots < max_pivots; ++pivots) {
      int enter = -1;
      const int limit = ban_artificials ? 2 * n_ + k_ : ncols_;
      for (int j = 0; j < limit; ++j)
        if (reduced(j) < -kReducedCostTol) {
          enter = j;
          break;
        }
      if (enter < 0) return 0;
      // Ratio test, ties broken by the smallest basic-variable index.
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < k_; ++r) {
        if (tab_(r, enter) <= kPivotTol) continue;
        const double ratio = rhs_(r) / tab_(r, enter);
        if (leave < 0 || ratio < best - kReducedCostTol ||
            (ratio < best + kReducedCostTol && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return 1;
      pivot(leave, enter);
      reduced = reduced_costs(cost);
    }
    return -1;
  }

  // Bland's rule with lexicographic reduced-cost comparison across the rows
  // of C. Returns 0 = optimal, 1 = unbounded, -1 = stalled. Artificial
  // columns are always banned (phase one has already run).
  int iterate_lex(const Eigen::MatrixXd& C) {
    const int m = static_cast<int>(C.rows());
    const long max_pivots = 2000L * (k_ + n_ + 10);
    for (long pivots = 0; pivots < max_pivots; ++pivots) {
      Eigen::MatrixXd CB(m, k_);
      for (int r = 0; r < k_; ++r) CB.col(r) = C.col(basis_[r]);
      const Eigen::MatrixXd R = C - CB * tab_;
      int enter = -1;
      for (int j = 0; j < 2 * n_ + k_ && enter < 0; ++j) {
        for (int i = 0; i < m; ++i) {
          if (R(i, j) < -kReducedCostTol) {
            enter = j;
            break;
          }
          if (R(i, j) > kReducedCostTol) break;
        }
      }
      if (enter < 0) return 0;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < k_; ++r) {
        if (tab_(r, enter) <= kPivotTol) continue;
        const double ratio = rhs_(r) / tab_(r, enter);
        if (leave < 0 || ratio < best - kReducedCostTol ||
            (ratio < best + kReducedCostTol && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return 1;
      pivot(leave, enter);
    }
    return -1;
  }

  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(k_);
    for (int r = 0; r < k_; ++r) cb(r) = cost(basis_[r]);
    return cost - tab_.transpose() * cb;
  }

  double current_value(const Eigen::VectorXd& cost) const {
    double v = 0.0;
    for (int r = 0; r < k_; ++r) v += cost(basis_[r]) * rhs_(r);
    return v;
  }

  void pivot(int row, int col) {
    const double piv = tab_(row, col);
    tab_.row(row) /= piv;
    rhs_(row) /= piv;
    basis_[row] = col;
    for (int r = 0; r < k_; ++r) {
      if (r == row) continue;
      const double factor = tab_(r, col);
      if (factor == 0.0) continue;
      tab_.row(r) -= factor * tab_.row(row);
      rhs_(r) -= factor * rhs_(row);
    }
  }

  // Pivot artificial variables out of the (degenerate) basis where possible.
  void drive_out_artificials() {
    for (int r = 0; r < k_; ++r) {
      if (basis_[r] < 2 * n_ + k_) continue;
      for (int j = 0; j < 2 * n_ + k_; ++j)
        if (std::abs(tab_(r, j)) > 1e-9) {
          pivot(r, j);
          break;
        }
    }
  }

  // Re-solve the final basic system from the original data. The tableau
  // rhs accumulates roundoff over pivots, which can leave the reported
  // vertex measurably off (and even infeasible) on ill-conditioned bases.
  void refine_basic_solution() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k_, k_);
    for (int r = 0; r < k_; ++r) {
      const int j = basis_[r];
      if (j < n_) {
        for (int i = 0; i < k_; ++i) B(i, r) = sigma_[i] * A0_(i, j);
      } else if (j < 2 * n_) {
        for (int i = 0; i < k_; ++i) B(i, r) = -sigma_[i] * A0_(i, j - n_);
      } else if (j < 2 * n_ + k_) {
        B(j - 2 * n_, r) = sigma_[j - 2 * n_];
      } else {
        B(j - 2 * n_ - k_, r) = 1.0;
      }
    }
    Eigen::VectorXd rhs0(k_);
    for (int i = 0; i < k_; ++i) rhs0(i) = sigma_[i] * b0_(i);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) rhs_ = lu.solve(rhs0);
  }

  Eigen::VectorXd extract_x() const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(ncols_);
    for (int r = 0; r < k_; ++r) full(basis_[r]) = rhs_(r);
    return full.head(n_) - full.segment(n_, n_);
  }

  // Row multipliers mu >= 0 for A x <= b, from the reduced costs of the
  // artificial columns: mu_k = sigma_k * reduced(artificial_k).
  Eigen::VectorXd extract_multipliers(const Eigen::VectorXd& cost) const {
    const Eigen::VectorXd reduced = reduced_costs(cost);
    Eigen::VectorXd mu(k_);
    for (int r = 0; r < k_; ++r)
      mu(r) = std::max(0.0, sigma_[r] * reduced(2 * n_ + k_ + r));
    return mu;
  }

  Eigen::VectorXd farkas_certificate(const Eigen::VectorXd& cost1) const {
    const Eigen::VectorXd reduced = reduced_costs(cost1);
    Eigen::VectorXd y(k_);
    // Phase-one duals: reduced(art_k) = 1 - y_k; the certificate for the
    // original rows carries the row sign back.
    for (int r = 0; r < k_; ++r)
      y(r) = -sigma_[r] * (1.0 - reduced(2 * n_ + k_ + r));
    return y.cwiseMax(0.0);
  }

  int n_, k_, ncols_;
  Eigen::VectorXd c_;
  Eigen::MatrixXd A0_;
  Eigen::VectorXd b0_;
  Eigen::MatrixXd tab_;
  Eigen::VectorXd rhs_;
  std::vector<double> sigma_;
  std::vector<int> basis_;
};

}  // namespace

SolveReport lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b) {
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != c.size()))
    throw std::invalid_argument("lp_solve: dimension mismatch");
  if (b.size() == 0) {
    SolveReport rep;
    if (c.cwiseAbs().maxCoeff() > 0.0) {
      rep.status = SolveStatus::Unbounded;
    } else {
      rep.x = Eigen::VectorXd::Zero(c.size());
      rep.value = 0.0;
      rep.multipliers = Eigen::VectorXd::Zero(0);
      rep.status = SolveStatus::Optimal;
      rep.residual = 0.0;
    }
    return rep;
  }
  Simplex s(c, A, b);
  return s.run();
}

SolveReport lexmin_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, double /*value_fix_tol*/) {
  const int d = static_cast<int>(c.size());
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != d))
    throw std::invalid_argument("lexmin_lp: dimension mismatch");
  if (b.size() == 0) {
    SolveReport rep;
    rep.status = (d == 0) ? SolveStatus::Optimal : SolveStatus::Unbounded;
    if (d == 0) {
      rep.x = Eigen::VectorXd::Zero(0);
      rep.value = 0.0;
      rep.residual = 0.0;
    }
    return rep;
  }
  std::vector<Eigen::VectorXd> objs;
  objs.reserve(d + 1);
  objs.push_back(c);
  for (int k = 0; k < d; ++k)
    objs.push_back(Eigen::VectorXd::Unit(d, k));
  Simplex s(c, A, b);
  SolveReport rep = s.run_lex(objs);
  rep.multipliers.resize(0);  // lexicographic duals are not meaningful here
  return rep;
}

SolveReport lexmin_lp_perturbed(const Eigen::VectorXd& c,
                                const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b, double delta0) {
  Eigen::VectorXd cp = c;
  double term = delta0;
  for (int i = 0; i < c.size(); ++i, term *= delta0) cp(i) += term;
  SolveReport rep = lp_solve(cp, A, b);
  if (rep.status == SolveStatus::Optimal) rep.value = c.dot(rep.x);
  return rep;
}

namespace {

bool lex_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

LpBasis extract_basis(const Eigen::VectorXd& x_star, const Eigen::VectorXd& c,
                      const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      int n_plain_rows) {
  const int d = static_cast<int>(c.size());
  const int K = static_cast<int>(b.size());
  const double tol = 1e-6 * (1.0 + x_star.cwiseAbs().maxCoeff());

  auto lexmin_subset =
      [&](const std::vector<int>& idx) -> std::optional<Eigen::VectorXd> {
    Eigen::MatrixXd As(idx.size(), d);
    Eigen::VectorXd bs(idx.size());
    for (size_t r = 0; r < idx.size(); ++r) {
      As.row(r) = A.row(idx[r]);
      bs(r) = b(idx[r]);
    }
    SolveReport rep = lexmin_lp(c, As, bs);
    if (rep.status != SolveStatus::Optimal) return std::nullopt;
    return rep.x;
  };

  // Candidate rows: the ones active at the solution.
  std::vector<int> work;
  for (int r = 0; r < K; ++r)
    if (std::abs(A.row(r).dot(x_star) - b(r)) <= kActiveTol * (1.0 + std::abs(b(r))))
      work.push_back(r);
  {
    auto probe = lexmin_subset(work);
    if (!probe || !lex_equal(*probe, x_star, tol)) {
      // Tolerance may have excluded a needed row; restart from all rows.
      work.resize(K);
      for (int r = 0; r < K; ++r) work[r] = r;
    }
  }

  // Greedy drop-one re-solve.
  for (size_t pos = 0; pos < work.size();) {
    if (work.size() <= static_cast<size_t>(d)) break;
    std::vector<int> reduced = work;
    reduced.erase(reduced.begin() + pos);
    auto probe = lexmin_subset(reduced);
    if (probe && lex_equal(*probe, x_star, tol)) {
      work = reduced;
    } else {
      ++pos;
    }
  }

  auto build = [&](const std::vector<int>& idx) {
    LpBasis basis;
    basis.rows = idx;
    basis.P.resize(idx.size(), d);
    basis.q.resize(idx.size());
    basis.from_box.resize(idx.size());
    for (size_t r = 0; r < idx.size(); ++r) {
      basis.P.row(r) = A.row(idx[r]);
      basis.q(r) = b(idx[r]);
      basis.from_box[r] = idx[r] >= n_plain_rows;
    }
    return basis;
  };

  if (static_cast<int>(work.size()) < d)
    throw std::runtime_error("extract_basis: fewer active rows than the dimension");
  if (static_cast<int>(work.size()) == d) {
    LpBasis basis = build(work);
    if (basis.P.fullPivLu().rank() < d)
      throw std::runtime_error("extract_basis: degenerate basis (singular P)");
    return basis;
  }

  // Degenerate vertex: more than d rows survived the greedy pass. Search
  // d-subsets (smallest row indices first) for a valid invertible basis.
  std::vector<int> pick(d);
  std::vector<int> stack;
  std::function<std::optional<LpBasis>(size_t, int)> search =
      [&](size_t from, int chosen) -> std::optional<LpBasis> {
    if (chosen == d) {
      std::vector<int> idx(stack.begin(), stack.end());
      LpBasis basis = build(idx);
      if (basis.P.fullPivLu().rank() < d) return std::nullopt;
      auto probe = lexmin_subset(idx);
      if (probe && lex_equal(*probe, x_star, tol)) return basis;
      return std::nullopt;
    }
    for (size_t i = from; i + (d - chosen) <= work.size(); ++i) {
      stack.push_back(work[i]);
      auto res = search(i + 1, chosen + 1);
      stack.pop_back();
      if (res) return res;
    }
    return std::nullopt;
  };
  auto found = search(0, 0);
  if (!found)
    throw std::runtime_error(
        "extract_basis: no valid basis found (numerical degeneracy)");
  return *found;
}

LexLpResult lex_lp_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                         const Eigen::VectorXd& b, double box_radius) {
  const int d = static_cast<int>(c.size());
  const int K = static_cast<int>(b.size());
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  if (box_radius > 0.0) {
    rows.resize(K + 2 * d, d);
    rhs.resize(K + 2 * d);
    rows.topRows(K) = A;
    rhs.head(K) = b;
    rows.middleRows(K, d) = Eigen::MatrixXd::Identity(d, d);
    rows.bottomRows(d) = -Eigen::MatrixXd::Identity(d, d);
    rhs.tail(2 * d).setConstant(box_radius);
  } else {
    rows = A;
    rhs = b;
  }

  LexLpResult out;
  out.report = lexmin_lp(c, rows, rhs);
  if (out.report.status != SolveStatus::Optimal) return out;

  out.basis = extract_basis(out.report.x, c, rows, rhs, K);
  // Polish: the basis rows pin the vertex exactly, removing the 1e-9
  // value-fixing drift of the sequential stages.
  out.report.x = out.basis.P.fullPivLu().solve(out.basis.q);
  out.report.value = c.dot(out.report.x);
  out.report.residual = 0.0;
  return out;
}

}  // namespace dopt
