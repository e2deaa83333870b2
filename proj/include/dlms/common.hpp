#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlms {

using AgentId = std::size_t;
using Round = std::int64_t;
using Vector = Eigen::VectorXd;

enum class Errc {
    invalid_agent,
    invalid_neighbor,
    shape,
    no_neighbors,
    incomplete_messages,
    incomplete_weights,
    empty_input,
    singular_recovery,
    not_a_target,
    domain,
    empty_window,
    empty_set,
    config,
    combinatorial_guard,
    io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Values keyed by agent id, ids kept in ascending order.
template <typename T>
struct NeighborMap {
    std::vector<AgentId> ids;
    std::vector<T> values;

    NeighborMap() = default;
    NeighborMap(std::vector<AgentId> keys, std::vector<T> vals)
        : ids(std::move(keys)), values(std::move(vals)) {}

    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }

    const T* find(AgentId id) const {
        auto it = std::lower_bound(ids.begin(), ids.end(), id);
        if (it == ids.end() || *it != id) {
            return nullptr;
        }
        return &values[static_cast<std::size_t>(it - ids.begin())];
    }

    T* find(AgentId id) {
        return const_cast<T*>(std::as_const(*this).find(id));
    }

    const T& at(AgentId id) const {
        if (const T* v = find(id)) {
            return *v;
        }
        throw Error(Errc::invalid_neighbor, "no entry for agent " + std::to_string(id));
    }

    /// Inserts keeping ids sorted; replaces an existing entry.
    void set(AgentId id, T value) {
        auto it = std::lower_bound(ids.begin(), ids.end(), id);
        auto pos = static_cast<std::size_t>(it - ids.begin());
        if (it != ids.end() && *it == id) {
            values[pos] = std::move(value);
            return;
        }
        ids.insert(it, id);
        values.insert(values.begin() + static_cast<std::ptrdiff_t>(pos), std::move(value));
    }
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace dlms
