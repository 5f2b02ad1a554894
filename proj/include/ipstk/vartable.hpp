#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipstk/common.hpp"

namespace ipstk {

/// Registry of variable names. One table is shared by every polynomial of a
/// session; identity of the table (pointer equality) is what makes two
/// polynomials compatible. Registration is append-only and ids are stable.
class VarTable {
public:
    VarId intern(const std::string& name) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        if (name.empty()) throw std::invalid_argument("variable name must be nonempty");
        VarId id = static_cast<VarId>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    std::optional<VarId> find(const std::string& name) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(VarId id) const {
        std::lock_guard<std::mutex> lock(mu_);
        if (id >= names_.size()) throw std::out_of_range("unknown variable id");
        return names_[id];
    }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return names_.size();
    }

private:
    mutable std::mutex mu_;
    std::vector<std::string> names_;
    std::map<std::string, VarId> index_;
};

using VarTablePtr = std::shared_ptr<VarTable>;

inline void require_same_table(const VarTablePtr& a, const VarTablePtr& b) {
    if (a.get() != b.get())
        throw std::invalid_argument("variable table mismatch between operands");
}

} // namespace ipstk
