// SPDX-License-Identifier: Apache-2.0
//
// starris: Green's-function channel model for metasurface RIS and STAR-RIS
// Copyright (C) 2026 The starris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef STARRIS_KERNEL_HPP
#define STARRIS_KERNEL_HPP

#include "core_em.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace starris
{
    // Coupling kernel K(r1, r2) = sum_m w_m conj(G(r_m, r1)) G(r_m, r2) over the receiver samples
    inline cplx kernel_exact(const SignalParams &params, const Point3 &src1, const Point3 &src2,
                             const BoxVolume &receiver, const QuadratureGrid &rx_grid)
    {
        if (receiver.contains(src1, 0.0) || receiver.contains(src2, 0.0))
            throw SingularPoint("source point lies inside the receiver volume");
        cplx acc = 0.0;
        for (std::size_t m = 0; m < rx_grid.size(); ++m)
            acc += rx_grid.weights[m] * std::conj(green_yy(params, rx_grid.points[m], src1)) *
                   green_yy(params, rx_grid.points[m], src2);
        return acc;
    }

    // Paraxial kernel of a sub-volume; the ratio check can be disabled by the caller
    inline cplx kernel_paraxial(const SignalParams &params, const Point3 &src1, const Point3 &src2,
                                const Point3 &subvolume_center, const BoxVolume &receiver,
                                bool enforce_domain = true, double subvolume_extent = 0.0)
    {
        const LocalFrame frame(subvolume_center, receiver.center);
        const double r = distance(receiver.center, subvolume_center);
        if (enforce_domain)
        {
            const double spread = 2.0 * std::max(distance(src1, subvolume_center), distance(src2, subvolume_center));
            const double size = std::max({receiver.max_extent(), spread, subvolume_extent});
            if (r < 5.0 * size)
                throw ParaxialDomainViolation("distance below five times the largest volume extent");
        }
        const cplx f1 = focusing_phase(params, frame.to_local(src1), r);
        const cplx f2 = focusing_phase(params, frame.to_local(src2), r);
        const double s = 4.0 * pi * r;
        return params.beta_sq() * f1 * std::conj(f2) * receiver.volume() / (s * s);
    }

    // Discretized kernel K = B^H B held through its weighted propagation factor
    // B(m, i) = sqrt(w_m w_i) G(r_m, s_i), rows are receiver samples, columns are source samples
    class KernelMatrix
    {
    public:
        KernelMatrix(Eigen::MatrixXcd factor, QuadratureGrid grid, BoxVolume receiver, QuadratureGrid rx_grid)
            : factor_(std::move(factor)), grid_(std::move(grid)), receiver_(receiver), rx_grid_(std::move(rx_grid)) {}

        std::size_t size() const { return std::size_t(factor_.cols()); }
        const Eigen::MatrixXcd &factor() const { return factor_; }
        const QuadratureGrid &grid() const { return grid_; }
        const QuadratureGrid &rx_grid() const { return rx_grid_; }
        const BoxVolume &receiver() const { return receiver_; }

        cplx entry(std::size_t i, std::size_t j) const
        {
            return factor_.col(Eigen::Index(i)).dot(factor_.col(Eigen::Index(j))); // conjugates the first argument
        }

        // Full Hermitian matrix, symmetrized
        Eigen::MatrixXcd dense() const
        {
            Eigen::MatrixXcd k = factor_.adjoint() * factor_;
            return (k + k.adjoint()) * 0.5;
        }

        Eigen::VectorXcd apply(const Eigen::VectorXcd &v) const { return factor_.adjoint() * (factor_ * v); }

        // v^H K v
        double quadratic_form(const Eigen::VectorXcd &v) const { return (factor_ * v).squaredNorm(); }

    private:
        Eigen::MatrixXcd factor_;
        QuadratureGrid grid_;
        BoxVolume receiver_;
        QuadratureGrid rx_grid_;
    };

    inline KernelMatrix build_kernel_matrix(const SignalParams &params, const QuadratureGrid &tx_grid,
                                            const BoxVolume &receiver, const QuadratureGrid &rx_grid)
    {
        if (tx_grid.source_volume.overlaps(receiver))
            throw SingularPoint("source and receiver volumes overlap");
        const Eigen::Index n_rx = Eigen::Index(rx_grid.size()), n_tx = Eigen::Index(tx_grid.size());
        Eigen::MatrixXcd b(n_rx, n_tx);
        for (Eigen::Index i = 0; i < n_tx; ++i)
        {
            const double wi = tx_grid.weights[std::size_t(i)];
            for (Eigen::Index m = 0; m < n_rx; ++m)
                b(m, i) = std::sqrt(rx_grid.weights[std::size_t(m)] * wi) *
                          green_yy(params, rx_grid.points[std::size_t(m)], tx_grid.points[std::size_t(i)]);
        }
        return KernelMatrix(std::move(b), tx_grid, receiver, rx_grid);
    }

    // Controls for the eigen-analysis
    struct EigenOptions
    {
        std::size_t dense_limit = 2048;       // Largest Gram dimension solved directly
        std::size_t max_iterations = 200000;  // Power iteration cap per eigenpair
        double residual_tolerance = 1e-10;    // Relative to the dominant eigenvalue
        std::uint64_t seed = 0x5eed;          // Start vectors of the power iteration
    };

    struct EigenPair
    {
        double value = 0.0;
        Eigen::VectorXcd vector; // Unit norm, indexed by source samples
    };

    namespace detail
    {
        // Eigen-analysis runs on whichever Gram matrix (B B^H or B^H B) is smaller
        struct GramSide
        {
            bool rx_side;
            Eigen::Index dim;
        };

        inline GramSide gram_side(const KernelMatrix &k)
        {
            const auto &b = k.factor();
            return b.rows() < b.cols() ? GramSide{true, b.rows()} : GramSide{false, b.cols()};
        }

        inline Eigen::MatrixXcd small_gram(const KernelMatrix &k, const GramSide &s)
        {
            const auto &b = k.factor();
            Eigen::MatrixXcd g = s.rx_side ? Eigen::MatrixXcd(b * b.adjoint()) : Eigen::MatrixXcd(b.adjoint() * b);
            return (g + g.adjoint()) * 0.5;
        }

        inline Eigen::VectorXcd gram_apply(const KernelMatrix &k, const GramSide &s, const Eigen::VectorXcd &u)
        {
            const auto &b = k.factor();
            return s.rx_side ? Eigen::VectorXcd(b * (b.adjoint() * u)) : Eigen::VectorXcd(b.adjoint() * (b * u));
        }

        // Map an eigenvector of the small Gram matrix to source space
        inline Eigen::VectorXcd to_source(const KernelMatrix &k, const GramSide &s, const Eigen::VectorXcd &u)
        {
            if (!s.rx_side)
                return u.normalized();
            Eigen::VectorXcd v = k.factor().adjoint() * u;
            const double n = v.norm();
            return n > 0.0 ? Eigen::VectorXcd(v / n) : v;
        }

        // Power iteration with deflation against the already converged vectors
        inline std::vector<std::pair<double, Eigen::VectorXcd>>
        power_iteration(const KernelMatrix &k, const GramSide &s, std::size_t max_count, double floor_ratio,
                        const EigenOptions &opt)
        {
            std::vector<std::pair<double, Eigen::VectorXcd>> found;
            std::mt19937_64 rng(opt.seed);
            std::normal_distribution<double> nd;
            double lambda_max = 0.0;
            auto project = [&](Eigen::VectorXcd &u)
            {
                for (const auto &f : found)
                    u -= f.second * f.second.dot(u);
            };
            while (found.size() < max_count && Eigen::Index(found.size()) < s.dim)
            {
                Eigen::VectorXcd u(s.dim);
                for (Eigen::Index i = 0; i < s.dim; ++i)
                    u(i) = cplx(nd(rng), nd(rng));
                project(u);
                u.normalize();
                double lambda = 0.0, previous = 0.0;
                bool converged = false;
                for (std::size_t it = 0; it < opt.max_iterations; ++it)
                {
                    Eigen::VectorXcd w = gram_apply(k, s, u);
                    project(w);
                    previous = lambda;
                    lambda = u.dot(w).real();
                    const double scale = std::max(lambda_max, lambda);
                    const double resid = (w - lambda * u).norm();
                    if (scale <= 0.0 || resid <= opt.residual_tolerance * scale)
                    {
                        converged = true;
                        break;
                    }
                    // The Rayleigh quotient only grows; once it stalls below the floor nothing above remains
                    const bool stalled = it > 50 && lambda - previous <= 1e-9 * lambda_max;
                    if (!found.empty() && stalled && lambda + resid < floor_ratio * lambda_max)
                        return found;
                    u = w.normalized();
                }
                if (!converged)
                    throw ConvergenceFailure("power iteration did not converge");
                if (found.empty())
                    lambda_max = lambda;
                if (found.size() > 0 && lambda < floor_ratio * lambda_max)
                    break;
                found.emplace_back(lambda, u);
                if (lambda_max <= 0.0)
                    break;
            }
            return found;
        }
    } // namespace detail

    // Eigenvalues in descending order; beyond the dense limit only those above floor_ratio * lambda_max
    inline Eigen::VectorXd kernel_spectrum(const KernelMatrix &k, double floor_ratio = 0.0, const EigenOptions &opt = {})
    {
        if (k.size() == 0)
            throw InvalidParameter("empty kernel matrix");
        const auto side = detail::gram_side(k);
        if (std::size_t(side.dim) <= opt.dense_limit)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::small_gram(k, side), Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success)
                throw ConvergenceFailure("Hermitian eigen-solver failed");
            return es.eigenvalues().reverse();
        }
        if (!(floor_ratio > 0.0))
            throw InvalidParameter("iterative spectrum needs a positive floor ratio");
        const auto found = detail::power_iteration(k, side, std::size_t(side.dim), floor_ratio, opt);
        Eigen::VectorXd ev(Eigen::Index(found.size()));
        for (std::size_t i = 0; i < found.size(); ++i)
            ev(Eigen::Index(i)) = found[i].first;
        return ev;
    }

    // Number of eigenvalues at or above threshold_ratio * lambda_max
    inline std::size_t effective_dof(const KernelMatrix &k, double threshold_ratio = 0.01, const EigenOptions &opt = {})
    {
        if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0))
            throw InvalidParameter("threshold ratio must lie in (0, 1)");
        const Eigen::VectorXd ev = kernel_spectrum(k, threshold_ratio, opt);
        const double cut = threshold_ratio * ev(0);
        std::size_t n = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            n += ev(i) >= cut ? 1 : 0;
        return std::max<std::size_t>(n, 1);
    }

    // Largest eigenvalue and its unit-norm eigenvector in source space
    inline EigenPair dominant_eigenpair(const KernelMatrix &k, const EigenOptions &opt = {})
    {
        if (k.size() == 0)
            throw InvalidParameter("empty kernel matrix");
        const auto side = detail::gram_side(k);
        EigenPair out;
        if (std::size_t(side.dim) <= opt.dense_limit)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::small_gram(k, side));
            if (es.info() != Eigen::Success)
                throw ConvergenceFailure("Hermitian eigen-solver failed");
            out.value = es.eigenvalues()(side.dim - 1);
            out.vector = detail::to_source(k, side, es.eigenvectors().col(side.dim - 1));
        }
        else
        {
            const auto found = detail::power_iteration(k, side, 1, 0.0, opt);
            out.value = found.front().first;
            out.vector = detail::to_source(k, side, found.front().second);
        }
        return out;
    }

    // Field samples E(r_m) = sum_i w_i G(r_m, s_i) J(s_i) radiated by a sampled current
    inline Eigen::VectorXcd radiate(const SignalParams &params, const QuadratureGrid &tx_grid,
                                    const Eigen::VectorXcd &current, const QuadratureGrid &rx_grid)
    {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(Eigen::Index(rx_grid.size()));
        for (std::size_t m = 0; m < rx_grid.size(); ++m)
        {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < tx_grid.size(); ++i)
                acc += tx_grid.weights[i] * green_yy(params, rx_grid.points[m], tx_grid.points[i]) * current(Eigen::Index(i));
            e(Eigen::Index(m)) = acc;
        }
        return e;
    }

} // namespace starris

#endif
