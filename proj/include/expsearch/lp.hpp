#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace expsearch {
namespace lp {

enum class Sense { LE, EQ, GE };
enum class Status { Optimal, Infeasible, IterationLimit };

struct RowCoef {
    int col;
    double val;
};

struct Row {
    std::vector<RowCoef> coefs;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

/// Minimization model over bounded columns with incremental row addition.
class LpModel {
public:
    int add_column(double lower, double upper, double obj);
    int add_row(std::vector<RowCoef> coefs, Sense sense, double rhs);
    void add_rows(const std::vector<Row>& rows);
    void set_bounds(int col, double lower, double upper);

    int column_count() const { return static_cast<int>(cols_.size()); }
    int row_count() const { return static_cast<int>(rows_.size()); }

    double lower(int col) const { return cols_[col].lower; }
    double upper(int col) const { return cols_[col].upper; }
    double objective(int col) const { return cols_[col].obj; }
    const Row& row(int r) const { return rows_[r]; }

    /// Textual dump in the industry LP format, for external cross-checks.
    void write_lp(std::ostream& os) const;

private:
    struct Column {
        double lower, upper, obj;
    };
    std::vector<Column> cols_;
    std::vector<Row> rows_;
};

/// Basis for warm starts. basic[r] >= 0 names a structural column; a value
/// of -(r'+1) names the slack of row r'. Rows added after the basis was
/// captured are extended with their own slacks.
struct Basis {
    std::vector<int> basic;
    std::vector<std::uint8_t> col_at_upper;
    std::vector<std::uint8_t> slack_at_upper;

    bool empty() const { return basic.empty(); }
};

struct LpSolution {
    Status status = Status::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    Basis basis;
    int iterations = 0;
};

struct SolveOptions {
    int iteration_limit = 200000;
};

/// Deterministic bounded-variable primal simplex (dense basis inverse,
/// composite phase one, Dantzig pricing with a Bland fallback under
/// degeneracy).
LpSolution solve(const LpModel& model, const Basis* warm = nullptr,
                 const SolveOptions& options = {});

/// Primal-feasibility audit: every row satisfied and the objective
/// reproducible from column values, both within tol.
bool audit(const LpModel& model, const LpSolution& sol, double tol = 1e-7);

}  // namespace lp
}  // namespace expsearch
