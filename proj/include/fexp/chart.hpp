#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fexp/error.hpp"

namespace fexp {

enum class GenClass { base, form, fiber };

const char* to_string(GenClass klass);

struct Generator {
    std::string name;
    int zdeg = 0;
    GenClass klass = GenClass::base;
    std::size_t index = 0;  // ordinal within its class

    bool odd() const { return (zdeg % 2) != 0; }
    int formdeg() const { return klass == GenClass::form ? 1 : 0; }
    int resdeg() const { return klass == GenClass::fiber ? 1 : 0; }
};

// Declares one base coordinate z^a together with its paired dz^a and eps^a.
struct BaseSpec {
    std::string name;
    int zdeg = 0;
    std::string form_name;
    std::string fiber_name;
};

struct Truncation {
    int res = 6;   // max resolution degree kept
    int form = 4;  // max form degree kept

    friend bool operator==(const Truncation&, const Truncation&) = default;
};

// The big chart of T[1]M (+) T[eps]M: base generators z^a, forms dz^a and
// fibers eps^a. The global generator order is class-major (base, form,
// fiber) and then by index, so generator k of class c sits at c*n + k.
class Chart {
public:
    static std::shared_ptr<const Chart> make(std::vector<BaseSpec> base,
                                             Truncation trunc = {});
    // Shorthand naming: z -> dz, z -> e<suffix> is not assumed; names are
    // derived as "d" + name and "e_" + name.
    static std::shared_ptr<const Chart> make_simple(
        const std::vector<std::pair<std::string, int>>& base, Truncation trunc = {});

    std::size_t size() const { return gens_.size(); }
    std::size_t base_count() const { return n_; }
    const Generator& gen(std::size_t i) const { return gens_[i]; }
    const std::vector<Generator>& generators() const { return gens_; }

    std::size_t base(std::size_t a) const { return a; }
    std::size_t form(std::size_t a) const { return n_ + a; }
    std::size_t fiber(std::size_t a) const { return 2 * n_ + a; }
    // Index of the base coordinate a generator is paired with.
    std::size_t pair_index(std::size_t g) const { return g % n_; }

    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t require(const std::string& name) const;

    const Truncation& trunc() const { return trunc_; }
    std::shared_ptr<const Chart> with_trunc(Truncation trunc) const;

    // Body dimension d, even graded m, odd graded n counts.
    std::size_t body_dim() const;
    std::size_t even_dim() const;
    std::size_t odd_dim() const;

    bool same_layout(const Chart& other) const;

private:
    std::size_t n_ = 0;
    std::vector<Generator> gens_;
    Truncation trunc_;
};

using ChartPtr = std::shared_ptr<const Chart>;

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* where);

}  // namespace fexp
