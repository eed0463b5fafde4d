// SPDX-License-Identifier: Apache-2.0
//
// Reference-signal dictionaries.
//
// The distortion c0 * x^Q (HD) or c0 * u1^|p| * u2^|q| (IMD), with x the
// FIR-filtered source, is linear in the products of delayed source samples
// obtained from the multinomial expansion of each power. Each such product is
// one dictionary column ("atom"). Three dictionary families are provided:
//
//   Exact        every term of the multinomial expansion
//   PriorArt     IMD only; each source raised to its power first, then delayed
//                independently: u1^|p|(n-k1) * u2^|q|(n-k2), J = L1 * L2
//   Hammerstein  nonlinearity before a shared delay line:
//                u1^|p|(n-k) * u2^|q|(n-k) (or s^Q(n-k) for HD), k < taps
//
// Multinomial coefficients are not applied to columns; they fold into the
// estimated coefficients. Columns are stored at unit 2-norm and the original
// norms are kept for de-normalization.
#pragma once

#include "nlcancel/distortion.hpp"
#include "nlcancel/errors.hpp"
#include "nlcancel/signal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace nlcancel {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline Eigen::Map<const CVector> as_vector(const BasebandSignal& s)
{
    return {s.samples().data(), static_cast<Eigen::Index>(s.size())};
}

inline BasebandSignal to_signal(const CVector& v, std::string label = {})
{
    return BasebandSignal(std::vector<cplx>(v.data(), v.data() + v.size()), std::move(label));
}

// ---------------------------------------------------------------------------
// Term counting

// C(n, k) with overflow detection.
inline std::uint64_t checked_binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // acc holds C(n-k+i-1, i-1); the product below is divisible by i.
        acc = acc * (n - k + i);
        acc /= i;
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw CountOverflowError("term count exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(acc);
}

// Number of monomials of total degree Q over L delayed samples: (Q+L-1)! / (Q! (L-1)!).
inline std::uint64_t hd_term_count(std::uint64_t Q, std::uint64_t L)
{
    if (Q < 1 || L < 1) throw std::invalid_argument("hd_term_count: Q and L must be >= 1");
    if (Q > std::numeric_limits<std::uint64_t>::max() - L)
        throw CountOverflowError("hd_term_count: Q + L overflows");
    return checked_binomial(Q + L - 1, L - 1);
}

inline std::uint64_t imd_term_count(std::int64_t p, std::int64_t q, std::uint64_t L1, std::uint64_t L2)
{
    if (p == 0 || q == 0) throw std::invalid_argument("imd_term_count: p and q must be nonzero");
    const std::uint64_t a = hd_term_count(static_cast<std::uint64_t>(std::llabs(p)), L1);
    const std::uint64_t b = hd_term_count(static_cast<std::uint64_t>(std::llabs(q)), L2);
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw CountOverflowError("imd_term_count: product overflows");
    return out;
}

// ---------------------------------------------------------------------------
// Term descriptors

struct TermFactor {
    int source = 0;           // 0 or 1
    std::size_t lag = 0;      // delay in samples
    int exponent = 1;         // positive
    bool conjugated = false;

    friend bool operator==(const TermFactor&, const TermFactor&) = default;
};

// One product of delayed source powers, factors ordered by (source, lag).
struct TermDescriptor {
    std::vector<TermFactor> factors;

    friend bool operator==(const TermDescriptor&, const TermDescriptor&) = default;

    int total_exponent(int source) const
    {
        int e = 0;
        for (const auto& f : factors)
            if (f.source == source) e += f.exponent;
        return e;
    }

    std::string to_string() const
    {
        std::string out;
        for (const auto& f : factors) {
            if (!out.empty()) out += '*';
            out += f.conjugated ? "conj(s" : "s";
            out += std::to_string(f.source + 1) + "(n-" + std::to_string(f.lag) + ")";
            if (f.conjugated) out += ')';
            if (f.exponent != 1) out += '^' + std::to_string(f.exponent);
        }
        return out;
    }
};

// All length-L exponent vectors summing to N, in descending lexicographic
// order: (N,0,..,0), (N-1,1,0,..), ..., (0,..,0,N).
inline std::vector<std::vector<int>> exponent_compositions(int N, std::size_t L)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(L, 0);
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == L) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (int t = remaining; t >= 0; --t) {
            cur[pos] = t;
            self(self, pos + 1, remaining - t);
        }
    };
    if (L > 0) rec(rec, 0, N);
    return out;
}

namespace detail {

inline std::vector<TermFactor> factors_of(const std::vector<int>& exponents, int source, bool conj)
{
    std::vector<TermFactor> out;
    for (std::size_t lag = 0; lag < exponents.size(); ++lag)
        if (exponents[lag] > 0) out.push_back({source, lag, exponents[lag], conj});
    return out;
}

} // namespace detail

// Exact multinomial terms. `L2` is ignored for HD. IMD terms are ordered with
// the source-1 exponent vector as the major key.
inline std::vector<TermDescriptor> enumerate_terms(const DistortionSpec& spec, std::size_t L1, std::size_t L2 = 0)
{
    spec.validate();
    if (L1 < 1) throw std::invalid_argument("enumerate_terms: model length must be >= 1");
    std::vector<TermDescriptor> out;
    if (spec.kind == DistortionKind::HD) {
        for (const auto& e : exponent_compositions(spec.Q, L1))
            out.push_back({detail::factors_of(e, 0, false)});
        return out;
    }
    if (L2 < 1) throw std::invalid_argument("enumerate_terms: model length must be >= 1");
    const auto first = exponent_compositions(std::abs(spec.p), L1);
    const auto second = exponent_compositions(std::abs(spec.q), L2);
    out.reserve(first.size() * second.size());
    for (const auto& e1 : first) {
        for (const auto& e2 : second) {
            auto f = detail::factors_of(e1, 0, spec.p < 0);
            auto g = detail::factors_of(e2, 1, spec.q < 0);
            f.insert(f.end(), g.begin(), g.end());
            out.push_back({std::move(f)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dictionary

enum class ModelKind { Exact, PriorArt, Hammerstein, Custom };

inline std::string_view to_string(ModelKind m)
{
    switch (m) {
    case ModelKind::Exact: return "exact";
    case ModelKind::PriorArt: return "prior";
    case ModelKind::Hammerstein: return "hammerstein";
    case ModelKind::Custom: return "custom";
    }
    return "?";
}

struct ModelShape {
    std::size_t L1 = 1;               // model length for source 1 (or the only source)
    std::size_t L2 = 1;               // model length for source 2 (IMD)
    std::size_t hammerstein_taps = 0; // Hammerstein delay-line length
    // PriorArt only: raise source 2 to |p| and source 1 to |q| instead of the
    // exponent-matched assignment.
    bool prior_swap_sources = false;
};

class Dictionary {
public:
    Dictionary() = default;

    // Normalizes each column of `raw` to unit norm. Throws DegenerateInputError on a zero column.
    Dictionary(CMatrix raw, std::vector<TermDescriptor> terms, ModelKind model)
        : columns_(std::move(raw)), terms_(std::move(terms)), model_(model)
    {
        if (!terms_.empty() && terms_.size() != static_cast<std::size_t>(columns_.cols()))
            throw std::invalid_argument("Dictionary: term count does not match column count");
        norms_.resize(static_cast<std::size_t>(columns_.cols()));
        for (Eigen::Index j = 0; j < columns_.cols(); ++j) {
            if (!columns_.col(j).allFinite())
                throw std::invalid_argument("Dictionary: non-finite column");
            const double nrm = columns_.col(j).norm();
            if (!(nrm > 0.0))
                throw DegenerateInputError("Dictionary: column " + std::to_string(j) + " has zero norm");
            columns_.col(j) /= nrm;
            norms_[static_cast<std::size_t>(j)] = nrm;
        }
    }

    static Dictionary from_matrix(CMatrix raw) { return Dictionary(std::move(raw), {}, ModelKind::Custom); }

    // Unit-norm columns.
    const CMatrix& columns() const { return columns_; }
    const std::vector<TermDescriptor>& terms() const { return terms_; }
    const std::vector<double>& norms() const { return norms_; }
    ModelKind model() const { return model_; }

    std::size_t rows() const { return static_cast<std::size_t>(columns_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(columns_.cols()); }

    CVector raw_column(std::size_t j) const
    {
        return columns_.col(static_cast<Eigen::Index>(j)) * norms_[j];
    }

    // Coefficients on unit columns -> coefficients on raw reference signals.
    CVector denormalize(const CVector& unit_coeffs) const
    {
        CVector out(unit_coeffs.size());
        for (Eigen::Index j = 0; j < unit_coeffs.size(); ++j)
            out(j) = unit_coeffs(j) / norms_[static_cast<std::size_t>(j)];
        return out;
    }

    CVector normalize(const CVector& raw_coeffs) const
    {
        CVector out(raw_coeffs.size());
        for (Eigen::Index j = 0; j < raw_coeffs.size(); ++j)
            out(j) = raw_coeffs(j) * norms_[static_cast<std::size_t>(j)];
        return out;
    }

private:
    CMatrix columns_;
    std::vector<TermDescriptor> terms_;
    std::vector<double> norms_;
    ModelKind model_ = ModelKind::Custom;
};

namespace detail {

// Evaluates one term over n = 0..P-1 with zero prefix for negative time.
inline void evaluate_term(const TermDescriptor& term, std::span<const BasebandSignal* const> sources,
                          Eigen::Ref<CVector> out)
{
    const auto P = static_cast<std::size_t>(out.size());
    for (std::size_t n = 0; n < P; ++n) {
        cplx acc{1.0, 0.0};
        for (const auto& f : term.factors) {
            if (n < f.lag) {
                acc = cplx{};
                break;
            }
            cplx v = (*sources[static_cast<std::size_t>(f.source)])[n - f.lag];
            if (f.conjugated) v = std::conj(v);
            acc *= ipow(v, f.exponent);
        }
        out(static_cast<Eigen::Index>(n)) = acc;
    }
}

inline std::vector<TermDescriptor> prior_art_terms(const DistortionSpec& spec, const ModelShape& shape)
{
    if (spec.kind != DistortionKind::IMD)
        throw std::invalid_argument("prior-art dictionary is defined for IMD only");
    int e1 = std::abs(spec.p), e2 = std::abs(spec.q);
    bool c1 = spec.p < 0, c2 = spec.q < 0;
    if (shape.prior_swap_sources) {
        std::swap(e1, e2);
        std::swap(c1, c2);
    }
    std::vector<TermDescriptor> out;
    for (std::size_t k1 = 0; k1 < shape.L1; ++k1)
        for (std::size_t k2 = 0; k2 < shape.L2; ++k2)
            out.push_back({{{0, k1, e1, c1}, {1, k2, e2, c2}}});
    return out;
}

inline std::vector<TermDescriptor> hammerstein_terms(const DistortionSpec& spec, const ModelShape& shape)
{
    if (shape.hammerstein_taps < 1) throw std::invalid_argument("Hammerstein dictionary needs >= 1 tap");
    std::vector<TermDescriptor> out;
    for (std::size_t k = 0; k < shape.hammerstein_taps; ++k) {
        if (spec.kind == DistortionKind::HD)
            out.push_back({{{0, k, spec.Q, false}}});
        else
            out.push_back({{{0, k, std::abs(spec.p), spec.p < 0}, {1, k, std::abs(spec.q), spec.q < 0}}});
    }
    return out;
}

} // namespace detail

// Materializes the P x J reference matrix for `model`. `s2` is required for IMD
// and ignored for HD. Throws DegenerateInputError if any column is all zero.
inline Dictionary build_dictionary(ModelKind model, const BasebandSignal& s1, const BasebandSignal* s2,
                                   const DistortionSpec& spec, const ModelShape& shape)
{
    spec.validate();
    const bool imd = spec.kind == DistortionKind::IMD;
    if (s1.empty()) throw std::invalid_argument("build_dictionary: empty source");
    if (imd && (s2 == nullptr || s2->size() != s1.size()))
        throw std::invalid_argument("build_dictionary: IMD needs a second source of equal length");
    if (shape.L1 < 1 || (imd && shape.L2 < 1))
        throw std::invalid_argument("build_dictionary: model lengths must be >= 1");

    std::vector<TermDescriptor> terms;
    switch (model) {
    case ModelKind::Exact: terms = enumerate_terms(spec, shape.L1, shape.L2); break;
    case ModelKind::PriorArt: terms = detail::prior_art_terms(spec, shape); break;
    case ModelKind::Hammerstein: terms = detail::hammerstein_terms(spec, shape); break;
    case ModelKind::Custom: throw std::invalid_argument("build_dictionary: custom model has no generator");
    }

    const BasebandSignal* sources[2] = {&s1, imd ? s2 : nullptr};
    CMatrix raw(static_cast<Eigen::Index>(s1.size()), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t j = 0; j < terms.size(); ++j)
        detail::evaluate_term(terms[j], sources, raw.col(static_cast<Eigen::Index>(j)));
    return Dictionary(std::move(raw), std::move(terms), model);
}

} // namespace nlcancel
