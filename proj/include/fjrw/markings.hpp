#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fjrw {

// The model W = x^r + y^s.
struct ModelParams {
    int r = 2;
    int s = 2;

    void validate() const
    {
        if (r < 2 || s < 2)
            throw std::invalid_argument("model parameters require r,s >= 2");
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Internal marking with twist (a,b), 0 <= a <= r-1, 0 <= b <= s-1.
struct Marking {
    int label = 0;
    int a = 0;
    int b = 0;

    friend bool operator==(const Marking&, const Marking&) = default;
};

// Per-label descendent exponents d_i >= 0.
using DescendentVector = std::map<int, int>;

// A fixed set of internal markings together with the model parameters.
// This is the shared context for the coefficient rings A_I and A_{I,sym}
// and for every chamber-index computation.
class MarkingSet {
public:
    MarkingSet(ModelParams params, std::vector<Marking> markings)
        : params_(params), markings_(std::move(markings))
    {
        params_.validate();
        std::sort(markings_.begin(), markings_.end(),
                  [](const Marking& x, const Marking& y) { return x.label < y.label; });
        for (std::size_t i = 0; i < markings_.size(); ++i) {
            const Marking& m = markings_[i];
            if (m.label <= 0)
                throw std::invalid_argument("marking labels must be positive");
            if (i > 0 && markings_[i - 1].label == m.label)
                throw std::invalid_argument("duplicate marking label " + std::to_string(m.label));
            if (m.a < 0 || m.a > params_.r - 1 || m.b < 0 || m.b > params_.s - 1)
                throw std::invalid_argument("twist out of range for label " + std::to_string(m.label));
        }
    }

    const ModelParams& params() const { return params_; }
    const std::vector<Marking>& markings() const { return markings_; }
    std::size_t size() const { return markings_.size(); }

    const Marking& marking(int label) const
    {
        auto it = std::lower_bound(markings_.begin(), markings_.end(), label,
                                   [](const Marking& m, int l) { return m.label < l; });
        if (it == markings_.end() || it->label != label)
            throw std::invalid_argument("unknown marking label " + std::to_string(label));
        return *it;
    }

    bool has_label(int label) const
    {
        auto it = std::lower_bound(markings_.begin(), markings_.end(), label,
                                   [](const Marking& m, int l) { return m.label < l; });
        return it != markings_.end() && it->label == label;
    }

    std::vector<int> labels() const
    {
        std::vector<int> out;
        out.reserve(markings_.size());
        for (const Marking& m : markings_)
            out.push_back(m.label);
        return out;
    }

    // |tw^{-1}(a,b) ∩ I|, the count-truncation bound of A_{I,sym}.
    int fiber_count(int a, int b) const
    {
        int n = 0;
        for (const Marking& m : markings_)
            if (m.a == a && m.b == b)
                ++n;
        return n;
    }

    friend bool operator==(const MarkingSet& x, const MarkingSet& y)
    {
        return x.params_ == y.params_ && x.markings_ == y.markings_;
    }

private:
    ModelParams params_;
    std::vector<Marking> markings_;
};

using MarkingSetPtr = std::shared_ptr<const MarkingSet>;

inline MarkingSetPtr make_marking_set(ModelParams params, std::vector<Marking> markings)
{
    return std::make_shared<const MarkingSet>(params, std::move(markings));
}

inline bool same_context(const MarkingSetPtr& x, const MarkingSetPtr& y)
{
    return x == y || (x && y && *x == *y);
}

}  // namespace fjrw
