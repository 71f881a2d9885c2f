#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mptcs {

// Field value domains. Sign is the two-point domain {-1, +1}; Grid is a
// fixed-size boolean grid stored row-major as one slot per cell.
enum class FieldKind { Int, Bool, Sign, Grid };

struct FieldSpec {
    std::string name;
    FieldKind kind = FieldKind::Int;
    int32_t lo = 0;  // Int domain, inclusive
    int32_t hi = 0;
    int rows = 0;  // Grid only
    int cols = 0;
    int offset = 0;  // slot offset, assigned by StateSchema

    int slot_count() const { return kind == FieldKind::Grid ? rows * cols : 1; }
};

// Flat value assignment over a schema; grids are flattened in place.
struct EnvState {
    std::vector<int32_t> slots;

    bool operator==(const EnvState&) const = default;
};

class StateSchema {
public:
    StateSchema() = default;
    explicit StateSchema(std::vector<FieldSpec> fields);

    int total_slots() const { return total_slots_; }
    const std::vector<FieldSpec>& fields() const { return fields_; }
    const FieldSpec& field(std::string_view name) const;
    int index_of(std::string_view name) const;  // -1 when absent

    EnvState zero_state() const;

    // Every slot within its field's domain.
    bool validate(const EnvState& state) const;
    std::string validate_message(const EnvState& state) const;  // empty when valid

private:
    std::vector<FieldSpec> fields_;
    int total_slots_ = 0;
};

bool slot_in_domain(const FieldSpec& f, int32_t value);

}  // namespace mptcs
