#include "expsearch/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "expsearch/graph.hpp"

namespace expsearch {
namespace lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kDegenerateStep = 1e-11;
constexpr int kBlandTrigger = 30;
constexpr int kRefactorEvery = 120;

}  // namespace

int LpModel::add_column(double lower, double upper, double obj) {
    if (!(lower <= upper)) throw ValidationError("column bounds crossed");
    cols_.push_back(Column{lower, upper, obj});
    return column_count() - 1;
}

int LpModel::add_row(std::vector<RowCoef> coefs, Sense sense, double rhs) {
    for (const RowCoef& c : coefs) {
        if (c.col < 0 || c.col >= column_count())
            throw ValidationError("row references unknown column " +
                                  std::to_string(c.col));
        if (!std::isfinite(c.val)) throw ValidationError("row coefficient not finite");
    }
    rows_.push_back(Row{std::move(coefs), sense, rhs});
    return row_count() - 1;
}

void LpModel::add_rows(const std::vector<Row>& rows) {
    for (const Row& r : rows) add_row(r.coefs, r.sense, r.rhs);
}

void LpModel::set_bounds(int col, double lower, double upper) {
    if (!(lower <= upper)) throw ValidationError("column bounds crossed");
    cols_[col].lower = lower;
    cols_[col].upper = upper;
}

void LpModel::write_lp(std::ostream& os) const {
    os << "Minimize\n obj:";
    bool any = false;
    for (int j = 0; j < column_count(); ++j) {
        if (cols_[j].obj == 0.0) continue;
        os << (cols_[j].obj >= 0 && any ? " +" : " ") << cols_[j].obj << " x" << j;
        any = true;
    }
    if (!any) os << " 0 x0";
    os << "\nSubject To\n";
    for (int r = 0; r < row_count(); ++r) {
        os << " r" << r << ":";
        for (const RowCoef& c : rows_[r].coefs)
            os << (c.val >= 0 ? " +" : " ") << c.val << " x" << c.col;
        switch (rows_[r].sense) {
            case Sense::LE: os << " <= "; break;
            case Sense::EQ: os << " = "; break;
            case Sense::GE: os << " >= "; break;
        }
        os << rows_[r].rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < column_count(); ++j) {
        if (cols_[j].lower == -kInf)
            os << " -inf <= x" << j << " <= " << cols_[j].upper << "\n";
        else
            os << " " << cols_[j].lower << " <= x" << j << " <= " << cols_[j].upper
               << "\n";
    }
    os << "End\n";
}

namespace {

// Bounded-variable primal simplex over the augmented space
// [structural columns | one slack per row].
class Simplex {
public:
    Simplex(const LpModel& model, const Basis* warm, const SolveOptions& options)
        : model_(model), options_(options), nc_(model.column_count()),
          m_(model.row_count()), ntot_(nc_ + m_) {
        build_columns();
        init_state(warm);
    }

    LpSolution run() {
        LpSolution sol;
        factorize();
        compute_basics();

        if (!phase(true)) {
            sol.status = iterations_ >= options_.iteration_limit
                             ? Status::IterationLimit
                             : Status::Infeasible;
            sol.iterations = iterations_;
            return sol;
        }
        bool optimal = phase(false);
        sol.status = optimal ? Status::Optimal : Status::IterationLimit;
        sol.iterations = iterations_;
        sol.values.resize(nc_);
        for (int j = 0; j < nc_; ++j) sol.values[j] = value_of(j);
        sol.objective = 0.0;
        for (int j = 0; j < nc_; ++j) sol.objective += model_.objective(j) * sol.values[j];
        sol.basis = export_basis();
        return sol;
    }

private:
    const LpModel& model_;
    const SolveOptions& options_;
    int nc_, m_, ntot_;

    // Column-major structural matrix; slack columns are implicit units.
    std::vector<std::vector<RowCoef>> col_entries_;  // per structural col: (row, val)
    std::vector<double> lo_, up_;                    // augmented bounds
    std::vector<double> rhs_;

    std::vector<int> basic_;        // per row: augmented variable id
    std::vector<int> pos_of_;       // augmented var -> basis position or -1
    std::vector<std::uint8_t> at_upper_;
    std::vector<double> binv_;      // row-major m x m
    std::vector<double> xb_;        // basic values by position
    int iterations_ = 0;
    int degenerate_streak_ = 0;
    int pivots_since_refactor_ = 0;

    void build_columns() {
        col_entries_.assign(nc_, {});
        lo_.resize(ntot_);
        up_.resize(ntot_);
        rhs_.resize(m_);
        for (int j = 0; j < nc_; ++j) {
            lo_[j] = model_.lower(j);
            up_[j] = model_.upper(j);
        }
        for (int r = 0; r < m_; ++r) {
            const Row& row = model_.row(r);
            rhs_[r] = row.rhs;
            for (const RowCoef& c : row.coefs)
                col_entries_[c.col].push_back(RowCoef{r, c.val});
            switch (row.sense) {
                case Sense::LE: lo_[nc_ + r] = 0.0; up_[nc_ + r] = kInf; break;
                case Sense::GE: lo_[nc_ + r] = -kInf; up_[nc_ + r] = 0.0; break;
                case Sense::EQ: lo_[nc_ + r] = 0.0; up_[nc_ + r] = 0.0; break;
            }
        }
        // Column entries end up sorted by row because rows are scanned in order.
    }

    void init_state(const Basis* warm) {
        basic_.assign(m_, -1);
        at_upper_.assign(ntot_, 0);
        for (int j = 0; j < ntot_; ++j)
            if (lo_[j] == -kInf && up_[j] != kInf) at_upper_[j] = 1;

        bool ok = warm && !warm->empty();
        if (ok) {
            std::vector<bool> used(ntot_, false);
            for (size_t r = 0; r < warm->basic.size() && r < static_cast<size_t>(m_); ++r) {
                int code = warm->basic[r];
                int var = code >= 0 ? code : nc_ + (-code - 1);
                if (code >= nc_ || var >= ntot_ || used[var]) {
                    ok = false;
                    break;
                }
                used[var] = true;
                basic_[r] = var;
            }
            if (ok) {
                for (int r = 0; r < m_; ++r)
                    if (basic_[r] < 0) {
                        if (used[nc_ + r]) {
                            ok = false;
                            break;
                        }
                        basic_[r] = nc_ + r;  // new rows carry their own slack
                        used[nc_ + r] = true;
                    }
            }
            if (ok) {
                for (int j = 0; j < nc_ && j < static_cast<int>(warm->col_at_upper.size());
                     ++j)
                    at_upper_[j] = warm->col_at_upper[j];
                for (int r = 0; r < m_ && r < static_cast<int>(warm->slack_at_upper.size());
                     ++r)
                    at_upper_[nc_ + r] = warm->slack_at_upper[r];
            }
        }
        if (!ok || !warm || warm->empty())
            for (int r = 0; r < m_; ++r) basic_[r] = nc_ + r;

        pos_of_.assign(ntot_, -1);
        for (int r = 0; r < m_; ++r) pos_of_[basic_[r]] = r;
        // Nonbasic variables with two infinite bounds rest at zero; encode as
        // "at lower" with a synthetic bound handled by value_of.
    }

    double bound_value(int j) const {
        if (at_upper_[j]) return up_[j] == kInf ? 0.0 : up_[j];
        return lo_[j] == -kInf ? 0.0 : lo_[j];
    }

    double value_of(int j) const {
        int p = pos_of_[j];
        return p >= 0 ? xb_[p] : bound_value(j);
    }

    // Dense Gauss-Jordan inversion of the basis matrix. Falls back to the
    // all-slack basis when the warm basis is singular.
    void factorize() {
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::vector<double> mat(static_cast<size_t>(m_) * m_, 0.0);
            for (int p = 0; p < m_; ++p) {
                int var = basic_[p];
                if (var >= nc_)
                    mat[static_cast<size_t>(var - nc_) * m_ + p] = 1.0;
                else
                    for (const RowCoef& c : col_entries_[var])
                        mat[static_cast<size_t>(c.col) * m_ + p] = c.val;
            }
            binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
            for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;

            bool singular = false;
            for (int col = 0; col < m_ && !singular; ++col) {
                int pivot_row = -1;
                double best = kPivotTol;
                for (int r = col; r < m_; ++r) {
                    double v = std::abs(mat[static_cast<size_t>(r) * m_ + col]);
                    if (v > best) {
                        best = v;
                        pivot_row = r;
                    }
                }
                if (pivot_row < 0) {
                    singular = true;
                    break;
                }
                if (pivot_row != col) {
                    for (int k = 0; k < m_; ++k) {
                        std::swap(mat[static_cast<size_t>(pivot_row) * m_ + k],
                                  mat[static_cast<size_t>(col) * m_ + k]);
                        std::swap(binv_[static_cast<size_t>(pivot_row) * m_ + k],
                                  binv_[static_cast<size_t>(col) * m_ + k]);
                    }
                }
                double piv = mat[static_cast<size_t>(col) * m_ + col];
                for (int k = 0; k < m_; ++k) {
                    mat[static_cast<size_t>(col) * m_ + k] /= piv;
                    binv_[static_cast<size_t>(col) * m_ + k] /= piv;
                }
                for (int r = 0; r < m_; ++r) {
                    if (r == col) continue;
                    double f = mat[static_cast<size_t>(r) * m_ + col];
                    if (f == 0.0) continue;
                    for (int k = 0; k < m_; ++k) {
                        mat[static_cast<size_t>(r) * m_ + k] -=
                            f * mat[static_cast<size_t>(col) * m_ + k];
                        binv_[static_cast<size_t>(r) * m_ + k] -=
                            f * binv_[static_cast<size_t>(col) * m_ + k];
                    }
                }
            }
            if (!singular) {
                pivots_since_refactor_ = 0;
                return;
            }
            // Singular warm basis: restart from slacks (identity, trivially ok).
            for (int r = 0; r < m_; ++r) basic_[r] = nc_ + r;
            std::fill(pos_of_.begin(), pos_of_.end(), -1);
            for (int r = 0; r < m_; ++r) pos_of_[nc_ + r] = r;
        }
        throw Error("basis factorization failed");
    }

    // x_B = B^-1 (b - N x_N)
    void compute_basics() {
        std::vector<double> b(rhs_);
        for (int j = 0; j < ntot_; ++j) {
            if (pos_of_[j] >= 0) continue;
            double xj = bound_value(j);
            if (xj == 0.0) continue;
            if (j >= nc_)
                b[j - nc_] -= xj;
            else
                for (const RowCoef& c : col_entries_[j]) b[c.col] -= c.val * xj;
        }
        xb_.assign(m_, 0.0);
        for (int p = 0; p < m_; ++p) {
            const double* row = &binv_[static_cast<size_t>(p) * m_];
            double s = 0.0;
            for (int r = 0; r < m_; ++r) s += row[r] * b[r];
            xb_[p] = s;
        }
    }

    double infeasibility() const {
        double total = 0.0;
        for (int p = 0; p < m_; ++p) {
            int var = basic_[p];
            if (xb_[p] < lo_[var]) total += lo_[var] - xb_[p];
            if (xb_[p] > up_[var]) total += xb_[p] - up_[var];
        }
        return total;
    }

    // y^T = c_B^T B^-1 for a dense basic cost vector.
    std::vector<double> btran(const std::vector<double>& cb) const {
        std::vector<double> y(m_, 0.0);
        for (int p = 0; p < m_; ++p) {
            if (cb[p] == 0.0) continue;
            const double* row = &binv_[static_cast<size_t>(p) * m_];
            double f = cb[p];
            for (int r = 0; r < m_; ++r) y[r] += f * row[r];
        }
        return y;
    }

    // w = B^-1 A_j
    std::vector<double> ftran(int j) const {
        std::vector<double> w(m_, 0.0);
        if (j >= nc_) {
            int r = j - nc_;
            for (int p = 0; p < m_; ++p) w[p] = binv_[static_cast<size_t>(p) * m_ + r];
        } else {
            for (const RowCoef& c : col_entries_[j]) {
                for (int p = 0; p < m_; ++p)
                    w[p] += c.val * binv_[static_cast<size_t>(p) * m_ + c.col];
            }
        }
        return w;
    }

    double reduced_cost(int j, const std::vector<double>& y, bool phase1) const {
        double d = phase1 ? 0.0 : (j < nc_ ? model_.objective(j) : 0.0);
        if (j >= nc_) return d - y[j - nc_];
        for (const RowCoef& c : col_entries_[j]) d -= y[c.col] * c.val;
        return d;
    }

    // One simplex phase; returns true when it finishes (feasible/optimal).
    bool phase(bool phase1) {
        while (iterations_ < options_.iteration_limit) {
            if (phase1 && infeasibility() <= kFeasTol * (1.0 + max_rhs())) return true;

            std::vector<double> cb(m_, 0.0);
            if (phase1) {
                for (int p = 0; p < m_; ++p) {
                    int var = basic_[p];
                    if (xb_[p] < lo_[var] - kFeasTol) cb[p] = -1.0;
                    else if (xb_[p] > up_[var] + kFeasTol) cb[p] = 1.0;
                }
            } else {
                for (int p = 0; p < m_; ++p)
                    if (basic_[p] < nc_) cb[p] = model_.objective(basic_[p]);
            }
            std::vector<double> y = btran(cb);

            bool bland = degenerate_streak_ >= kBlandTrigger;
            int enter = -1, enter_dir = 0;
            double best_score = kDualTol;
            for (int j = 0; j < ntot_; ++j) {
                if (pos_of_[j] >= 0) continue;
                if (lo_[j] == up_[j]) continue;  // fixed
                double d = reduced_cost(j, y, phase1);
                int dir = 0;
                if (!at_upper_[j] && d < -kDualTol) dir = 1;
                else if (at_upper_[j] && d > kDualTol) dir = -1;
                else if (lo_[j] == -kInf && up_[j] == kInf && std::abs(d) > kDualTol)
                    dir = d < 0 ? 1 : -1;  // free variable resting at zero
                if (dir == 0) continue;
                if (bland) {
                    enter = j;
                    enter_dir = dir;
                    break;
                }
                if (std::abs(d) > best_score) {
                    best_score = std::abs(d);
                    enter = j;
                    enter_dir = dir;
                }
            }
            if (enter < 0) {
                if (phase1) return infeasibility() <= kFeasTol * (1.0 + max_rhs());
                return true;  // optimal
            }

            std::vector<double> w = ftran(enter);
            double limit = kInf;
            int leave_pos = -1;
            double leave_bound = 0.0;  // bound the leaving variable lands on
            for (int p = 0; p < m_; ++p) {
                double rate = -enter_dir * w[p];  // d x_B[p] / dt
                if (std::abs(rate) <= kPivotTol) continue;
                int var = basic_[p];
                double x = xb_[p];
                double t = kInf, target = 0.0;
                if (phase1 && x < lo_[var] - kFeasTol) {
                    if (rate > 0) { t = (lo_[var] - x) / rate; target = lo_[var]; }
                } else if (phase1 && x > up_[var] + kFeasTol) {
                    if (rate < 0) { t = (up_[var] - x) / rate; target = up_[var]; }
                } else if (rate < 0) {
                    if (lo_[var] != -kInf) { t = (lo_[var] - x) / rate; target = lo_[var]; }
                } else {
                    if (up_[var] != kInf) { t = (up_[var] - x) / rate; target = up_[var]; }
                }
                if (t == kInf) continue;
                t = std::max(t, 0.0);
                if (t < limit - 1e-12 ||
                    (t < limit + 1e-12 && (leave_pos < 0 || var < basic_[leave_pos]))) {
                    limit = t;
                    leave_pos = p;
                    leave_bound = target;
                }
            }
            double flip = (lo_[enter] != -kInf && up_[enter] != kInf)
                              ? up_[enter] - lo_[enter]
                              : kInf;
            if (flip <= limit + 1e-12 && flip < kInf) {
                // Bound flip: no basis change.
                for (int p = 0; p < m_; ++p) xb_[p] -= enter_dir * flip * w[p];
                at_upper_[enter] = at_upper_[enter] ? 0 : 1;
                ++iterations_;
                degenerate_streak_ = flip <= kDegenerateStep ? degenerate_streak_ + 1 : 0;
                continue;
            }
            if (limit == kInf) {
                if (phase1) throw Error("phase-1 ray: numerical breakdown");
                throw Error("LP is unbounded");
            }

            // Pivot: enter at position leave_pos.
            int leave_var = basic_[leave_pos];
            double enter_value = bound_value(enter) + enter_dir * limit;
            for (int p = 0; p < m_; ++p)
                if (p != leave_pos) xb_[p] -= enter_dir * limit * w[p];
            double piv = w[leave_pos];
            double* prow = &binv_[static_cast<size_t>(leave_pos) * m_];
            for (int k = 0; k < m_; ++k) prow[k] /= piv;
            for (int p = 0; p < m_; ++p) {
                if (p == leave_pos || w[p] == 0.0) continue;
                double f = w[p];
                double* row = &binv_[static_cast<size_t>(p) * m_];
                for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
            }
            basic_[leave_pos] = enter;
            pos_of_[enter] = leave_pos;
            pos_of_[leave_var] = -1;
            at_upper_[leave_var] = (leave_bound == up_[leave_var] && up_[leave_var] != kInf)
                                       ? 1
                                       : 0;
            xb_[leave_pos] = enter_value;
            ++iterations_;
            degenerate_streak_ = limit <= kDegenerateStep ? degenerate_streak_ + 1 : 0;

            if (++pivots_since_refactor_ >= kRefactorEvery) {
                factorize();
                compute_basics();
            }
        }
        return false;
    }

    double max_rhs() const {
        double m = 0.0;
        for (double b : rhs_) m = std::max(m, std::abs(b));
        return m;
    }

    Basis export_basis() const {
        Basis b;
        b.basic.resize(m_);
        for (int r = 0; r < m_; ++r)
            b.basic[r] = basic_[r] >= nc_ ? -(basic_[r] - nc_ + 1) : basic_[r];
        b.col_at_upper.assign(at_upper_.begin(), at_upper_.begin() + nc_);
        b.slack_at_upper.assign(at_upper_.begin() + nc_, at_upper_.end());
        return b;
    }
};

}  // namespace

LpSolution solve(const LpModel& model, const Basis* warm, const SolveOptions& options) {
    if (model.row_count() == 0) {
        LpSolution sol;
        sol.status = Status::Optimal;
        sol.values.resize(model.column_count());
        for (int j = 0; j < model.column_count(); ++j) {
            double c = model.objective(j);
            sol.values[j] = c >= 0 ? model.lower(j) : model.upper(j);
            sol.objective += c * sol.values[j];
        }
        return sol;
    }
    Simplex simplex(model, warm, options);
    return simplex.run();
}

bool audit(const LpModel& model, const LpSolution& sol, double tol) {
    if (sol.status != Status::Optimal) return false;
    for (int j = 0; j < model.column_count(); ++j) {
        double x = sol.values[j];
        if (x < model.lower(j) - tol || x > model.upper(j) + tol) return false;
    }
    for (int r = 0; r < model.row_count(); ++r) {
        const Row& row = model.row(r);
        double lhs = 0.0;
        for (const RowCoef& c : row.coefs) lhs += c.val * sol.values[c.col];
        double scale = tol * (1.0 + std::abs(row.rhs));
        switch (row.sense) {
            case Sense::LE:
                if (lhs > row.rhs + scale) return false;
                break;
            case Sense::GE:
                if (lhs < row.rhs - scale) return false;
                break;
            case Sense::EQ:
                if (std::abs(lhs - row.rhs) > scale) return false;
                break;
        }
    }
    double obj = 0.0;
    for (int j = 0; j < model.column_count(); ++j)
        obj += model.objective(j) * sol.values[j];
    return std::abs(obj - sol.objective) <= tol * (1.0 + std::abs(obj));
}

}  // namespace lp
}  // namespace expsearch
