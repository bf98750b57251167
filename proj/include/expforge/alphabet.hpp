#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace expforge {

// Symbol sequences are stored as indices into an Alphabet.
using Sequence = std::vector<int>;

// Ordered set of distinct symbol labels. Every vector in a model indexes
// against this order.
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    const std::string& label(std::size_t i) const { return symbols_.at(i); }

    // Throws InputError for an unknown label.
    int index_of(std::string_view label) const;

    // Tokens separated by whitespace or commas are looked up as labels;
    // otherwise each character is a single-character label.
    Sequence parse(std::string_view text) const;
    std::string render(const Sequence& seq) const;

    bool operator==(const Alphabet&) const = default;

private:
    std::vector<std::string> symbols_;
};

// States have the same shape as output symbols.
using StateSet = Alphabet;

}  // namespace expforge
