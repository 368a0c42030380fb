#ifndef QCCS_QSTATE_HPP
#define QCCS_QSTATE_HPP

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qccs {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Entrywise / invariant tolerance shared across the quantum layer.
inline constexpr double kMatrixTol = 1e-9;
/// Probability mass below this is treated as an impossible branch.
inline constexpr double kProbFloor = 1e-12;
/// Largest register accepted by default (2^8 x 2^8 matrices).
inline constexpr int kDefaultMaxQubits = 8;

struct QStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Trace-preserving completely positive map given by Kraus operators on k qubits.
struct SuperOperator {
    int arity = 0;
    std::vector<CMatrix> kraus;

    /// Checks dimensions and Kraus completeness (sum K†K = I) within tol.
    void validate(double tol = kMatrixTol) const;
    static SuperOperator identity(int arity);
    bool isIdentity(double tol = kMatrixTol) const;
};

/// Non-degenerate projective measurement: orthogonal projectors summing to I,
/// each tagged with a distinct real outcome.
struct Measurement {
    struct Branch {
        double outcome = 0.0;
        CMatrix projector;
    };
    int arity = 0;
    std::vector<Branch> branches;

    void validate(double tol = kMatrixTol) const;
};

/// Single-qubit preset states usable in model files.
enum class KetPreset { Zero, One, Plus, Minus };

/// Reduced matrix produced by a partial trace; keeps the surviving qubit names.
struct ReducedState {
    std::vector<std::string> qubits;
    CMatrix matrix;
};

// A density operator over an ordered, named qubit register. Values are
// immutable once constructed; every producing operation returns a new QState.
class QState {
  public:
    /// Wraps a density matrix; verifies Hermiticity and unit trace eagerly.
    /// The PSD check is deferred to validate() since it needs an eigensolve.
    QState(std::vector<std::string> registerNames, CMatrix matrix);

    static QState fromKets(std::vector<std::string> registerNames,
                           const std::vector<KetPreset>& kets);

    const std::vector<std::string>& registerNames() const { return *register_; }
    const CMatrix& matrix() const { return matrix_; }
    int qubitCount() const { return static_cast<int>(register_->size()); }
    Eigen::Index dim() const { return matrix_.rows(); }

    /// Index of a qubit in the register; throws on unknown names.
    int qubitIndex(const std::string& name) const;
    bool hasQubit(const std::string& name) const;

    /// Full invariant check: Hermitian, trace 1, positive semidefinite.
    void validate(double tol = kMatrixTol) const;

  private:
    std::shared_ptr<const std::vector<std::string>> register_;
    CMatrix matrix_;
};

/// Embeds a k-qubit operator into the register space, acting on the named
/// qubits in the order given (bit order matches the register tensor order).
CMatrix liftOperator(const CMatrix& op, const std::vector<int>& positions, int totalQubits);

/// Applies a super-operator to the named qubits: sum_j K_j rho K_j†.
QState applySuper(const QState& rho, const SuperOperator& op,
                  const std::vector<std::string>& qubits);

struct MeasureOutcome {
    double outcome;
    double probability;
    QState postState;
};

/// Projective measurement on the named qubits; branches with probability
/// below kProbFloor are dropped and the rest carry normalized post-states.
std::vector<MeasureOutcome> measure(const QState& rho, const Measurement& m,
                                    const std::vector<std::string>& qubits);

/// Traces out the qubits in `traced`, keeping the rest in register order.
ReducedState partialTrace(const QState& rho, const std::vector<std::string>& traced);

/// Entrywise max-norm comparison; registers must agree exactly.
bool stateEq(const QState& a, const QState& b, double tol = kMatrixTol);

bool matrixEq(const CMatrix& a, const CMatrix& b, double tol = kMatrixTol);

/// 2x2 density matrix of a preset ket.
CMatrix ketDensity(KetPreset preset);

/// Compact text form of a matrix, e.g. "[[0.5, 0.5], [0.5, 0.5]]".
std::string formatMatrix(const CMatrix& m);

std::string formatComplex(const Cplx& z);

}  // namespace qccs

#endif
