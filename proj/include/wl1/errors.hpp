#pragma once

#include <stdexcept>
#include <string>

namespace wl1 {

/// No sign change of g3 was found over the scanned log(Q-hat) range.
class NoSignChange : public std::runtime_error {
public:
    NoSignChange(const std::string& what, double q_lo, double q_hi)
        : std::runtime_error(what), q_lo_(q_lo), q_hi_(q_hi) {}

    double scanned_lo() const { return q_lo_; }
    double scanned_hi() const { return q_hi_; }

private:
    double q_lo_;
    double q_hi_;
};

/// A bracketed one-dimensional solve had no root inside its bracket.
class NoRoot : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An LP solve inside a Monte Carlo trial did not reach optimality.
class TrialError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too many trials of one system size failed.
class ExperimentAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The extrapolation design matrix is rank deficient (too few or repeated sizes).
class SingularFit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wl1
