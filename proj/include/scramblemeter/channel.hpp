#pragma once

// Channels seen by the optimizer. Anything exposing the Schroedinger-picture
// map on input operators and its Heisenberg-picture adjoint on effects will do.

#include <concepts>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "qstate.hpp"

namespace scramblemeter {

template <class Ch>
concept QuantumChannel = requires(const Ch& ch, const CMatrix& op) {
    { ch.input_dim() } -> std::convertible_to<Index>;
    { ch.output_dim() } -> std::convertible_to<Index>;
    { ch.apply(op) } -> std::convertible_to<CMatrix>;
    { ch.adjoint(op) } -> std::convertible_to<CMatrix>;
};

/// rho -> Tr_{S \ C}(V rho V^dagger).
class IsometricChannel {
public:
    IsometricChannel(Isometry v, SubsystemSpec c) : v_(std::move(v)), c_(std::move(c)) {}

    Index input_dim() const noexcept { return v_.in_dim(); }
    Index output_dim() const noexcept { return c_.k(); }
    CMatrix apply(const CMatrix& rho) const { return apply_channel_operator(v_, c_, rho); }
    CMatrix adjoint(const CMatrix& mu) const { return adjoint_effect(v_, c_, mu); }

    const Isometry& isometry() const noexcept { return v_; }
    const SubsystemSpec& subsystem() const noexcept { return c_; }

private:
    Isometry v_;
    SubsystemSpec c_;
};

/// A linear map stored through its images of the matrix units E_ij, so that
/// Phi(rho) = sum_ij rho_ij Phi(E_ij) and Phi^dagger(mu)_ji = Tr(mu Phi(E_ij)).
class TransferChannel {
public:
    /// images[i * d_in + j] = Phi(E_ij).
    TransferChannel(Index input_dim, std::vector<CMatrix> images) : din_(input_dim), images_(std::move(images)) {
        if (static_cast<Index>(images_.size()) != din_ * din_) {
            throw DimensionError("transfer channel needs d_in^2 matrix-unit images");
        }
        dout_ = images_.front().rows();
        for (const auto& m : images_) {
            if (m.rows() != dout_ || m.cols() != dout_) throw DimensionError("transfer channel images must share a shape");
        }
    }

    template <QuantumChannel Ch>
    static TransferChannel from(const Ch& ch) {
        const Index d = ch.input_dim();
        std::vector<CMatrix> images;
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < d; ++j) {
                CMatrix e = CMatrix::Zero(d, d);
                e(i, j) = 1.0;
                images.push_back(ch.apply(e));
            }
        }
        return TransferChannel(d, std::move(images));
    }

    Index input_dim() const noexcept { return din_; }
    Index output_dim() const noexcept { return dout_; }

    CMatrix apply(const CMatrix& rho) const {
        if (rho.rows() != din_ || rho.cols() != din_) throw DimensionError("transfer channel: input dimension mismatch");
        CMatrix out = CMatrix::Zero(dout_, dout_);
        for (Index i = 0; i < din_; ++i)
            for (Index j = 0; j < din_; ++j) out += rho(i, j) * images_[static_cast<std::size_t>(i * din_ + j)];
        return out;
    }

    CMatrix adjoint(const CMatrix& mu) const {
        if (mu.rows() != dout_ || mu.cols() != dout_) throw DimensionError("transfer channel: effect dimension mismatch");
        CMatrix out(din_, din_);
        for (Index i = 0; i < din_; ++i)
            for (Index j = 0; j < din_; ++j)
                out(j, i) = (mu.transpose().cwiseProduct(images_[static_cast<std::size_t>(i * din_ + j)])).sum();
        return out;
    }

    /// Choi matrix sum_ij E_ij (x) Phi(E_ij).
    CMatrix choi() const {
        CMatrix out = CMatrix::Zero(din_ * dout_, din_ * dout_);
        for (Index i = 0; i < din_; ++i)
            for (Index j = 0; j < din_; ++j)
                out.block(i * dout_, j * dout_, dout_, dout_) = images_[static_cast<std::size_t>(i * din_ + j)];
        return out;
    }

private:
    Index din_;
    Index dout_ = 0;
    std::vector<CMatrix> images_;
};

}  // namespace scramblemeter
