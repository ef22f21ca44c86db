#include "calbench/params.hpp"

#include <cmath>

namespace calbench {

ParamVector::ParamVector(std::initializer_list<ParamEntry> entries) {
    for (const auto& e : entries) add(e.name, e.value, e.lower, e.upper);
}

void ParamVector::add(const std::string& name, double value, double lower, double upper) {
    if (name.empty()) throw std::invalid_argument("parameter name must be non-empty");
    if (!(lower <= upper)) throw std::invalid_argument("parameter " + name + ": lower > upper");
    if (!(lower <= value && value <= upper))
        throw std::invalid_argument("parameter " + name + ": value " + std::to_string(value) +
                                    " outside [" + std::to_string(lower) + ", " +
                                    std::to_string(upper) + "]");
    for (const auto& e : entries_)
        if (e.name == name) throw std::invalid_argument("duplicate parameter name: " + name);
    entries_.push_back({name, value, lower, upper});
}

std::size_t ParamVector::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name) return i;
    throw std::invalid_argument("unknown parameter: " + name);
}

bool ParamVector::has(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return true;
    return false;
}

double ParamVector::get(const std::string& name) const { return entries_[index_of(name)].value; }

void ParamVector::set(const std::string& name, double value) {
    auto& e = entries_[index_of(name)];
    if (!(e.lower <= value && value <= e.upper))
        throw std::invalid_argument("parameter " + name + ": value " + std::to_string(value) +
                                    " outside bounds");
    e.value = value;
}

std::vector<double> ParamVector::values() const {
    std::vector<double> v;
    v.reserve(entries_.size());
    for (const auto& e : entries_) v.push_back(e.value);
    return v;
}

std::vector<std::string> ParamVector::names() const {
    std::vector<std::string> v;
    v.reserve(entries_.size());
    for (const auto& e : entries_) v.push_back(e.name);
    return v;
}

ParamVector ParamVector::with_values(std::span<const double> vals) const {
    if (vals.size() != entries_.size())
        throw std::invalid_argument("with_values: size mismatch");
    ParamVector out;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        out.add(entries_[i].name, vals[i], entries_[i].lower, entries_[i].upper);
    return out;
}

ParamVector ParamVector::subset(const std::vector<std::string>& names) const {
    ParamVector out;
    for (const auto& n : names) {
        const auto& e = entries_[index_of(n)];
        out.add(e.name, e.value, e.lower, e.upper);
    }
    return out;
}

ParamVector ParamVector::merged(const ParamVector& free) const {
    ParamVector out = *this;
    for (const auto& e : free.entries()) out.set(e.name, e.value);
    return out;
}

bool ParamVector::same_layout(const ParamVector& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name != other.entries_[i].name) return false;
        if (entries_[i].lower != other.entries_[i].lower) return false;
        if (entries_[i].upper != other.entries_[i].upper) return false;
    }
    return true;
}

double param_distance(const ParamVector& a, const ParamVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("param_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name)
            throw std::invalid_argument("param_distance: name/order mismatch at position " +
                                        std::to_string(i));
        const double d = a[i].value - b[i].value;
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace calbench
