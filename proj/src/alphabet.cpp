#include "expforge/alphabet.hpp"

#include "expforge/errors.hpp"

#include <algorithm>
#include <set>

namespace expforge {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw InputError("alphabet must contain at least one symbol");
    std::set<std::string> seen;
    for (const auto& s : symbols_) {
        if (s.empty()) throw InputError("empty symbol label");
        if (!seen.insert(s).second) throw InputError("duplicate symbol label '" + s + "'");
    }
}

int Alphabet::index_of(std::string_view label) const {
    const auto it = std::find(symbols_.begin(), symbols_.end(), label);
    if (it == symbols_.end()) throw InputError("unknown symbol '" + std::string(label) + "'");
    return static_cast<int>(it - symbols_.begin());
}

Sequence Alphabet::parse(std::string_view text) const {
    const auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\n' || c == '\r'; };
    Sequence seq;
    if (std::any_of(text.begin(), text.end(), is_sep)) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && is_sep(text[i])) ++i;
            std::size_t j = i;
            while (j < text.size() && !is_sep(text[j])) ++j;
            if (j > i) seq.push_back(index_of(text.substr(i, j - i)));
            i = j;
        }
    } else {
        seq.reserve(text.size());
        for (std::size_t i = 0; i < text.size(); ++i) seq.push_back(index_of(text.substr(i, 1)));
    }
    return seq;
}

std::string Alphabet::render(const Sequence& seq) const {
    const bool single_char = std::all_of(symbols_.begin(), symbols_.end(),
                                         [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!single_char && i > 0) out += ' ';
        out += label(static_cast<std::size_t>(seq[i]));
    }
    return out;
}

}  // namespace expforge
