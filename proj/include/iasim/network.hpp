#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iasim/complex_matrix.hpp"

namespace iasim {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Network geometry: K users, per-user antenna counts, streams, subcarriers.
struct NetworkDims {
    int users = 0;                  // K
    std::vector<int> tx_antennas;   // M_k
    std::vector<int> rx_antennas;   // N_k
    int streams = 1;                // N_s per user
    int subcarriers = 1;            // N

    static NetworkDims uniform(int users, int tx, int rx, int streams, int subcarriers) {
        NetworkDims d;
        d.users = users;
        d.tx_antennas.assign(users, tx);
        d.rx_antennas.assign(users, rx);
        d.streams = streams;
        d.subcarriers = subcarriers;
        return d;
    }

    /// The 3-user 2x2 single-stream configuration the closed-form aligner
    /// covers.
    static NetworkDims three_user_2x2() { return uniform(3, 2, 2, 1, 1); }

    void validate() const {
        if (users < 1) throw ConfigError("dims: user count must be >= 1");
        if ((int)tx_antennas.size() != users || (int)rx_antennas.size() != users)
            throw ConfigError("dims: antenna count lists must have one entry per user");
        for (int m : tx_antennas)
            if (m < 1) throw ConfigError("dims: tx antenna counts must be positive");
        for (int n : rx_antennas)
            if (n < 1) throw ConfigError("dims: rx antenna counts must be positive");
        if (subcarriers < 1) throw ConfigError("dims: subcarrier count must be >= 1");
        if (streams < 1) throw ConfigError("dims: stream count must be >= 1");
        for (int k = 0; k < users; ++k)
            if (streams > std::min(tx_antennas[k], rx_antennas[k]))
                throw ConfigError("dims: streams exceed min(tx, rx) antennas for user " +
                                  std::to_string(k + 1));
    }

    bool closed_form_solvable() const {
        if (users != 3 || streams != 1) return false;
        for (int k = 0; k < 3; ++k)
            if (tx_antennas[k] != 2 || rx_antennas[k] != 2) return false;
        return true;
    }

    bool operator==(const NetworkDims&) const = default;
};

/// Tapped-delay-line power profile; per-tap variances sum to 1 so that the
/// per-subcarrier response keeps unit entry variance.
struct TapProfile {
    std::vector<double> powers;

    static TapProfile uniform(int taps) {
        TapProfile p;
        p.powers.assign(taps, 1.0 / taps);
        return p;
    }

    int taps() const { return (int)powers.size(); }

    void validate(int subcarriers) const {
        if (powers.empty()) throw ConfigError("tap profile: needs at least one tap");
        double s = 0.0;
        for (double p : powers) {
            if (p < 0.0) throw ConfigError("tap profile: negative tap power");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw ConfigError("tap profile: tap powers must sum to 1");
        if ((int)powers.size() > subcarriers)
            throw ConfigError("tap profile: more taps than subcarriers");
    }
};

/// Per-user transmit/receive spatial correlation (Hermitian PSD, unit
/// diagonal).
struct KroneckerSpec {
    std::vector<CMatrix> r_tx;  // M_k x M_k per user
    std::vector<CMatrix> r_rx;  // N_k x N_k per user

    /// Constant-correlation spec: every off-diagonal entry equals rho.
    static KroneckerSpec constant_rho(const NetworkDims& dims, double rho_tx, double rho_rx) {
        auto fill = [](int n, double rho) {
            CMatrix r = CMatrix::identity(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) r(i, j) = rho;
            return r;
        };
        KroneckerSpec s;
        for (int k = 0; k < dims.users; ++k) {
            s.r_tx.push_back(fill(dims.tx_antennas[k], rho_tx));
            s.r_rx.push_back(fill(dims.rx_antennas[k], rho_rx));
        }
        return s;
    }

    void validate(const NetworkDims& dims) const {
        if ((int)r_tx.size() != dims.users || (int)r_rx.size() != dims.users)
            throw ConfigError("kronecker spec: one correlation matrix per user and side");
        auto check = [](const CMatrix& r, int n, const char* side) {
            if ((int)r.rows() != n || (int)r.cols() != n)
                throw ConfigError(std::string("kronecker spec: ") + side +
                                  " matrix does not match antenna count");
            if (!r.is_hermitian(1e-10))
                throw ConfigError(std::string("kronecker spec: ") + side +
                                  " matrix not Hermitian");
            for (int i = 0; i < n; ++i)
                if (std::abs(r(i, i) - cplx{1.0, 0.0}) > 1e-10)
                    throw ConfigError(std::string("kronecker spec: ") + side +
                                      " matrix diagonal must be 1");
        };
        for (int k = 0; k < dims.users; ++k) {
            check(r_tx[k], dims.tx_antennas[k], "tx");
            check(r_rx[k], dims.rx_antennas[k], "rx");
        }
    }
};

/// One network realization: H[k][m][n] is the rx_antennas[k] x tx_antennas[m]
/// channel from transmitter m to receiver k on subcarrier n. Immutable in
/// normal use; generators and loaders are the only writers.
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(NetworkDims dims, std::string generator, std::uint64_t seed)
        : dims_(std::move(dims)), generator_(std::move(generator)), seed_(seed) {
        dims_.validate();
        h_.resize((std::size_t)dims_.users * dims_.users * dims_.subcarriers);
        for (int k = 0; k < dims_.users; ++k)
            for (int m = 0; m < dims_.users; ++m)
                for (int n = 0; n < dims_.subcarriers; ++n)
                    at(k, m, n) = CMatrix(dims_.rx_antennas[k], dims_.tx_antennas[m]);
    }

    const NetworkDims& dims() const { return dims_; }
    const std::string& generator() const { return generator_; }
    std::uint64_t seed() const { return seed_; }

    CMatrix& at(int rx, int tx, int subcarrier) {
        return h_[index(rx, tx, subcarrier)];
    }
    const CMatrix& at(int rx, int tx, int subcarrier) const {
        return h_[index(rx, tx, subcarrier)];
    }

    /// Scale one link across all subcarriers (used to emulate unequal
    /// signal-to-interference setups after normalization).
    void scale_link(int rx, int tx, double gain) {
        for (int n = 0; n < dims_.subcarriers; ++n) at(rx, tx, n) *= cplx{gain, 0.0};
    }

    bool all_finite() const {
        for (const auto& m : h_)
            if (!m.is_finite()) return false;
        return true;
    }

    bool operator==(const ChannelSet& o) const {
        if (!(dims_ == o.dims_)) return false;
        for (std::size_t i = 0; i < h_.size(); ++i)
            if (h_[i].data() != o.h_[i].data()) return false;
        return true;
    }

private:
    std::size_t index(int rx, int tx, int subcarrier) const {
        return ((std::size_t)rx * dims_.users + tx) * dims_.subcarriers + subcarrier;
    }

    NetworkDims dims_;
    std::string generator_;
    std::uint64_t seed_ = 0;
    std::vector<CMatrix> h_;
};

}  // namespace iasim
