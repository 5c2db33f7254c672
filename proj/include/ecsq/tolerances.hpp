#pragma once
// tolerances.hpp — certified tolerances, pinned in one place.
//
// Every residual gate used by the library, the certificates and the
// acceptance suite reads from here.  All values are quoted at the default
// grid resolution N = 256.

namespace ecsq::tol {

inline constexpr int kDefaultGridSize = 256;

// septuple family
inline constexpr double kRiccatiResidual = 1e-7;       // coupled Riccati system, max-norm
inline constexpr double kCompatibilityOde = 1e-8;      // d/dt log(sigma/rho) balance
inline constexpr double kBetaTwoRoute = 1e-8;          // beta from the rho-side vs sigma-side
inline constexpr double kSpecTwoPathCertified = 1e-9;  // exponent-integral vs direct route
inline constexpr double kSpecTwoPathHardFail = 1e-6;   // beyond this the computation aborts
inline constexpr double kRoundTrip = 1e-8;             // coordinate round trips, max-norm

// cubic roots and spectrum inversion
inline constexpr double kRootProduct = 1e-12;
inline constexpr double kRootSum = 1e-10;
inline constexpr double kLambdaNuExcluded = 1e-9;  // |lambda*nu - 1| must exceed this
inline constexpr double kNewtonResidual = 1e-9;    // log-coordinate spectrum residual
inline constexpr double kNonconstancyMargin = 1e-6;  // max f - min f for nonconstant members

// solution spaces, monodromy, lattices
inline constexpr double kFirstOrderResidual = 1e-8;
inline constexpr double kSecondOrderResidual = 1e-7;
inline constexpr double kOmegaConstancy = 1e-9;
inline constexpr double kOmegaNotASolution = 1e-6;
inline constexpr double kOmegaInvariance = 1e-8;
inline constexpr double kLagrangian = 1e-9;
inline constexpr double kDetTwoPath = 1e-8;
inline constexpr double kDetUnimodular = 1e-8;
inline constexpr double kCompanionEntry = 1e-8;
inline constexpr double kLatticeInteger = 1e-6;
inline constexpr double kLatticeSpan = 1e-10;
inline constexpr double kEvaluationSingularValue = 1e-8;
inline constexpr double kCompanionCondition = 1e8;
inline constexpr double kDim4Margin = 0.01;

// group axioms
inline constexpr double kGroupIdentity = 1e-9;
inline constexpr double kCentralCommute = 1e-12;
inline constexpr double kEquivariance = 1e-8;
inline constexpr double kMembershipResidual = 1e-6;

// curvature certificates
inline constexpr double kNablaWeyl = 1e-6;
inline constexpr double kWeylNonzeroRel = 1e-4;
inline constexpr double kNablaRiemannNonzeroRel = 1e-4;
inline constexpr double kRicciOffTT = 1e-9;
inline constexpr double kRicciRatioConstancy = 1e-8;
inline constexpr double kRicciRecurrence = 1e-8;
inline constexpr double kNablaDt = 1e-9;
inline constexpr double kRiemannSymmetry = 1e-9;
inline constexpr double kWeylTraceFree = 1e-8;
inline constexpr double kHalvingRatioLow = 3.0;
inline constexpr double kHalvingRatioHigh = 5.0;
inline constexpr double kIsometry = 1e-7;

}  // namespace ecsq::tol
