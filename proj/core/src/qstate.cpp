#include "qccs/qstate.hpp"

#include "qccs/expr.hpp"

#include <algorithm>
#include <cmath>

namespace qccs {

namespace {

Eigen::Index dimForArity(int arity) { return Eigen::Index(1) << arity; }

void requireSquare(const CMatrix& m, Eigen::Index dim, const std::string& what) {
    if (m.rows() != dim || m.cols() != dim)
        throw QStateError(what + ": expected " + std::to_string(dim) + "x" + std::to_string(dim) +
                          " matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
}

}  // namespace

void SuperOperator::validate(double tol) const {
    if (arity <= 0) throw QStateError("super-operator arity must be positive");
    if (kraus.empty()) throw QStateError("super-operator needs at least one Kraus operator");
    Eigen::Index dim = dimForArity(arity);
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (const auto& k : kraus) {
        requireSquare(k, dim, "Kraus operator");
        sum += k.adjoint() * k;
    }
    if (!matrixEq(sum, CMatrix::Identity(dim, dim), tol))
        throw QStateError("Kraus operators are not trace-preserving (sum K†K != I)");
}

SuperOperator SuperOperator::identity(int arity) {
    Eigen::Index dim = dimForArity(arity);
    return SuperOperator{arity, {CMatrix::Identity(dim, dim)}};
}

bool SuperOperator::isIdentity(double tol) const {
    Eigen::Index dim = dimForArity(arity);
    if (kraus.size() != 1) return false;
    // identity up to global phase is not considered; plain I only
    return matrixEq(kraus[0], CMatrix::Identity(dim, dim), tol);
}

void Measurement::validate(double tol) const {
    if (arity <= 0) throw QStateError("measurement arity must be positive");
    if (branches.empty()) throw QStateError("measurement needs at least one branch");
    Eigen::Index dim = dimForArity(arity);
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (size_t i = 0; i < branches.size(); ++i) {
        const CMatrix& e = branches[i].projector;
        requireSquare(e, dim, "projector");
        if (!matrixEq(e, e.adjoint(), tol)) throw QStateError("projector is not Hermitian");
        if (!matrixEq(e * e, e, tol)) throw QStateError("projector is not idempotent");
        for (size_t j = 0; j < i; ++j) {
            if (branches[i].outcome == branches[j].outcome)
                throw QStateError("measurement outcomes must be pairwise distinct");
            if (!matrixEq(branches[i].projector * branches[j].projector, CMatrix::Zero(dim, dim),
                          tol))
                throw QStateError("measurement projectors are not mutually orthogonal");
        }
        sum += e;
    }
    if (!matrixEq(sum, CMatrix::Identity(dim, dim), tol))
        throw QStateError("measurement projectors do not sum to the identity");
}

QState::QState(std::vector<std::string> registerNames, CMatrix matrix)
    : register_(std::make_shared<const std::vector<std::string>>(std::move(registerNames))),
      matrix_(std::move(matrix)) {
    Eigen::Index dim = Eigen::Index(1) << register_->size();
    requireSquare(matrix_, dim, "density matrix");
    for (size_t i = 0; i < register_->size(); ++i)
        for (size_t j = i + 1; j < register_->size(); ++j)
            if ((*register_)[i] == (*register_)[j])
                throw QStateError("duplicate qubit name '" + (*register_)[i] + "' in register");
    if (!matrixEq(matrix_, matrix_.adjoint(), kMatrixTol))
        throw QStateError("density matrix is not Hermitian");
    if (std::abs(matrix_.trace().real() - 1.0) > kMatrixTol ||
        std::abs(matrix_.trace().imag()) > kMatrixTol)
        throw QStateError("density matrix trace is not 1");
}

QState QState::fromKets(std::vector<std::string> registerNames,
                        const std::vector<KetPreset>& kets) {
    if (registerNames.size() != kets.size())
        throw QStateError("preset list length does not match register size");
    CMatrix m = CMatrix::Identity(1, 1);
    for (KetPreset k : kets) {
        CMatrix q = ketDensity(k);
        CMatrix next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) next.block(r * 2, c * 2, 2, 2) = m(r, c) * q;
        m = std::move(next);
    }
    return QState(std::move(registerNames), std::move(m));
}

int QState::qubitIndex(const std::string& name) const {
    for (size_t i = 0; i < register_->size(); ++i)
        if ((*register_)[i] == name) return static_cast<int>(i);
    throw QStateError("unknown qubit '" + name + "'");
}

bool QState::hasQubit(const std::string& name) const {
    return std::find(register_->begin(), register_->end(), name) != register_->end();
}

void QState::validate(double tol) const {
    if (!matrixEq(matrix_, matrix_.adjoint(), tol)) throw QStateError("state is not Hermitian");
    if (std::abs(matrix_.trace().real() - 1.0) > tol || std::abs(matrix_.trace().imag()) > tol)
        throw QStateError("state trace is not 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw QStateError("eigensolve failed");
    if (solver.eigenvalues().minCoeff() < -tol)
        throw QStateError("state is not positive semidefinite (min eigenvalue " +
                          formatReal(solver.eigenvalues().minCoeff()) + ")");
}

CMatrix liftOperator(const CMatrix& op, const std::vector<int>& positions, int totalQubits) {
    int k = static_cast<int>(positions.size());
    Eigen::Index opDim = Eigen::Index(1) << k;
    requireSquare(op, opDim, "lifted operator");
    for (int p : positions)
        if (p < 0 || p >= totalQubits) throw QStateError("qubit position out of range");

    // rest = register positions not targeted, kept in register order.
    std::vector<int> rest;
    for (int i = 0; i < totalQubits; ++i)
        if (std::find(positions.begin(), positions.end(), i) == positions.end()) rest.push_back(i);

    Eigen::Index fullDim = Eigen::Index(1) << totalQubits;
    Eigen::Index restDim = Eigen::Index(1) << rest.size();
    CMatrix out = CMatrix::Zero(fullDim, fullDim);

    // Qubit at register position p owns bit (totalQubits-1-p) of a basis index.
    auto scatter = [&](Eigen::Index target, Eigen::Index restBits) {
        Eigen::Index idx = 0;
        for (int j = 0; j < k; ++j)
            if ((target >> (k - 1 - j)) & 1) idx |= Eigen::Index(1) << (totalQubits - 1 - positions[j]);
        for (size_t j = 0; j < rest.size(); ++j)
            if ((restBits >> (rest.size() - 1 - j)) & 1)
                idx |= Eigen::Index(1) << (totalQubits - 1 - rest[j]);
        return idx;
    };

    for (Eigen::Index rt = 0; rt < opDim; ++rt)
        for (Eigen::Index ct = 0; ct < opDim; ++ct) {
            if (op(rt, ct) == Cplx(0.0, 0.0)) continue;
            for (Eigen::Index rb = 0; rb < restDim; ++rb)
                out(scatter(rt, rb), scatter(ct, rb)) = op(rt, ct);
        }
    return out;
}

namespace {

std::vector<int> resolvePositions(const QState& rho, const std::vector<std::string>& qubits,
                                  int arity, const char* what) {
    if (static_cast<int>(qubits.size()) != arity)
        throw QStateError(std::string(what) + ": expected " + std::to_string(arity) +
                          " qubit(s), got " + std::to_string(qubits.size()));
    std::vector<int> positions;
    positions.reserve(qubits.size());
    for (const auto& q : qubits) positions.push_back(rho.qubitIndex(q));
    for (size_t i = 0; i < positions.size(); ++i)
        for (size_t j = i + 1; j < positions.size(); ++j)
            if (positions[i] == positions[j])
                throw QStateError(std::string(what) + ": duplicate qubit '" + qubits[i] + "'");
    return positions;
}

}  // namespace

QState applySuper(const QState& rho, const SuperOperator& op,
                  const std::vector<std::string>& qubits) {
    auto positions = resolvePositions(rho, qubits, op.arity, "applySuper");
    CMatrix acc = CMatrix::Zero(rho.dim(), rho.dim());
    for (const auto& k : op.kraus) {
        CMatrix lifted = liftOperator(k, positions, rho.qubitCount());
        acc += lifted * rho.matrix() * lifted.adjoint();
    }
    return QState(rho.registerNames(), std::move(acc));
}

std::vector<MeasureOutcome> measure(const QState& rho, const Measurement& m,
                                    const std::vector<std::string>& qubits) {
    auto positions = resolvePositions(rho, qubits, m.arity, "measure");
    std::vector<MeasureOutcome> out;
    for (const auto& branch : m.branches) {
        CMatrix lifted = liftOperator(branch.projector, positions, rho.qubitCount());
        CMatrix post = lifted * rho.matrix() * lifted.adjoint();
        double p = post.trace().real();
        if (p <= kProbFloor) continue;
        out.push_back(MeasureOutcome{branch.outcome, p, QState(rho.registerNames(), post / p)});
    }
    return out;
}

ReducedState partialTrace(const QState& rho, const std::vector<std::string>& traced) {
    std::vector<int> tracedPos;
    for (const auto& q : traced) tracedPos.push_back(rho.qubitIndex(q));
    std::sort(tracedPos.begin(), tracedPos.end());
    tracedPos.erase(std::unique(tracedPos.begin(), tracedPos.end()), tracedPos.end());

    int n = rho.qubitCount();
    std::vector<int> kept;
    std::vector<std::string> keptNames;
    for (int i = 0; i < n; ++i)
        if (!std::binary_search(tracedPos.begin(), tracedPos.end(), i)) {
            kept.push_back(i);
            keptNames.push_back(rho.registerNames()[i]);
        }

    Eigen::Index keptDim = Eigen::Index(1) << kept.size();
    Eigen::Index traceDim = Eigen::Index(1) << tracedPos.size();
    CMatrix out = CMatrix::Zero(keptDim, keptDim);

    auto compose = [&](Eigen::Index keptBits, Eigen::Index tracedBits) {
        Eigen::Index idx = 0;
        for (size_t j = 0; j < kept.size(); ++j)
            if ((keptBits >> (kept.size() - 1 - j)) & 1) idx |= Eigen::Index(1) << (n - 1 - kept[j]);
        for (size_t j = 0; j < tracedPos.size(); ++j)
            if ((tracedBits >> (tracedPos.size() - 1 - j)) & 1)
                idx |= Eigen::Index(1) << (n - 1 - tracedPos[j]);
        return idx;
    };

    for (Eigen::Index r = 0; r < keptDim; ++r)
        for (Eigen::Index c = 0; c < keptDim; ++c) {
            Cplx sum(0.0, 0.0);
            for (Eigen::Index t = 0; t < traceDim; ++t)
                sum += rho.matrix()(compose(r, t), compose(c, t));
            out(r, c) = sum;
        }
    return ReducedState{std::move(keptNames), std::move(out)};
}

bool stateEq(const QState& a, const QState& b, double tol) {
    if (a.registerNames() != b.registerNames())
        throw QStateError("stateEq: register mismatch");
    return matrixEq(a.matrix(), b.matrix(), tol);
}

bool matrixEq(const CMatrix& a, const CMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

CMatrix ketDensity(KetPreset preset) {
    CMatrix m(2, 2);
    switch (preset) {
        case KetPreset::Zero: m << 1, 0, 0, 0; break;
        case KetPreset::One: m << 0, 0, 0, 1; break;
        case KetPreset::Plus: m << 0.5, 0.5, 0.5, 0.5; break;
        case KetPreset::Minus: m << 0.5, -0.5, -0.5, 0.5; break;
    }
    return m;
}

std::string formatComplex(const Cplx& z) {
    double re = z.real() == 0.0 ? 0.0 : z.real();
    double im = z.imag() == 0.0 ? 0.0 : z.imag();
    if (im == 0.0) return formatReal(re);
    std::string s = formatReal(re);
    s += (im < 0 ? " - " : " + ") + formatReal(std::abs(im)) + "i";
    return s;
}

std::string formatMatrix(const CMatrix& m) {
    std::string s = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) s += ", ";
        s += "[";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) s += ", ";
            s += formatComplex(m(r, c));
        }
        s += "]";
    }
    s += "]";
    return s;
}

}  // namespace qccs
