#pragma once

#include <stdexcept>
#include <string>

namespace entbound {

// Base class for all library errors. Specific failure modes get their own
// type so callers can branch without parsing messages.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- linear algebra ---
struct NonSquare : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotHurwitz : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct NotSPD : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };

// --- scalar numerics ---
struct BadBracket : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct MaxDepth : Error { using Error::Error; };

// --- system validation ---
struct NotHurwitzNominal : NotHurwitz { using NotHurwitz::NotHurwitz; };
struct NotHurwitzPerturbed : NotHurwitz { using NotHurwitz::NotHurwitz; };
struct NotControllable : Error { using Error::Error; };
struct NotElliptic : Error { using Error::Error; };
struct NotReversible : Error { using Error::Error; };
struct NotInvertibleB : Error { using Error::Error; };
struct NotContractive : Error { using Error::Error; };

// --- CGF bound machinery ---
struct OutOfDomain : Error { using Error::Error; };
struct KTooLarge : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };
struct NegativeInput : Error { using Error::Error; };

// Raised when an entropy level exceeds the range of nu; carries the
// supremum so callers can report it.
struct EpsBeyondRange : Error {
    double nu_supremum;
    EpsBeyondRange(const std::string& msg, double sup) : Error(msg), nu_supremum(sup) {}
};

// --- Fokker-Planck tables ---
struct NotNormalizable : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct NonPositiveDensity : Error { using Error::Error; };
struct NonPositiveRatio : Error { using Error::Error; };

// --- simulation / IO ---
struct Unstable : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace entbound
