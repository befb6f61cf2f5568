#include "flagdecomp/flagspace.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace flagdecomp {

FlagType::FlagType(std::vector<Index> signature, Index ambient)
    : signature_(std::move(signature)), ambient_(ambient) {
    if (signature_.empty()) {
        throw InvalidArgument("flag type needs at least one level");
    }
    Index prev = 0;
    for (const Index n : signature_) {
        if (n <= prev) {
            throw InvalidArgument("flag type signature must be positive and strictly increasing: " +
                                  to_string());
        }
        prev = n;
    }
    if (signature_.back() > ambient_) {
        throw InvalidArgument("flag type " + to_string() + ": n_k exceeds the ambient dimension");
    }
}

FlagType FlagType::parse(const std::string& text, Index ambient) {
    std::vector<Index> sig;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        std::size_t lo = pos;
        std::size_t hi = end;
        while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
        while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + lo, text.data() + hi, value);
        if (lo == hi || ec != std::errc() || ptr != text.data() + hi) {
            throw InvalidArgument("cannot parse flag type '" + text + "'");
        }
        sig.push_back(static_cast<Index>(value));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return FlagType(std::move(sig), ambient);
}

Index FlagType::width(std::size_t i) const {
    return signature_.at(i) - offset(i);
}

std::vector<Index> FlagType::widths() const {
    std::vector<Index> out;
    out.reserve(signature_.size());
    for (std::size_t i = 0; i < signature_.size(); ++i) {
        out.push_back(width(i));
    }
    return out;
}

std::string FlagType::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < signature_.size(); ++i) {
        os << (i ? "," : "") << signature_[i];
    }
    os << ';' << ambient_ << ')';
    return os.str();
}

}  // namespace flagdecomp
