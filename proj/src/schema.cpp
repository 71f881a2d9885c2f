#include "mptcs/schema.hpp"

#include <sstream>
#include <stdexcept>

namespace mptcs {

StateSchema::StateSchema(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
    int offset = 0;
    for (auto& f : fields_) {
        if (f.name.empty()) throw std::invalid_argument("schema field with empty name");
        if (f.kind == FieldKind::Int && f.hi < f.lo)
            throw std::invalid_argument("empty Int domain for field " + f.name);
        if (f.kind == FieldKind::Grid && (f.rows <= 0 || f.cols <= 0))
            throw std::invalid_argument("empty Grid domain for field " + f.name);
        f.offset = offset;
        offset += f.slot_count();
    }
    total_slots_ = offset;
}

const FieldSpec& StateSchema::field(std::string_view name) const {
    int idx = index_of(name);
    if (idx < 0) throw std::out_of_range("no such schema field: " + std::string(name));
    return fields_[static_cast<size_t>(idx)];
}

int StateSchema::index_of(std::string_view name) const {
    for (size_t i = 0; i < fields_.size(); ++i)
        if (fields_[i].name == name) return static_cast<int>(i);
    return -1;
}

EnvState StateSchema::zero_state() const {
    EnvState s;
    s.slots.assign(static_cast<size_t>(total_slots_), 0);
    // Sign fields have no zero; their minimum is -1.
    for (const auto& f : fields_) {
        if (f.kind == FieldKind::Sign) s.slots[static_cast<size_t>(f.offset)] = -1;
        if (f.kind == FieldKind::Int && f.lo > 0) s.slots[static_cast<size_t>(f.offset)] = f.lo;
    }
    return s;
}

bool slot_in_domain(const FieldSpec& f, int32_t value) {
    switch (f.kind) {
        case FieldKind::Int: return value >= f.lo && value <= f.hi;
        case FieldKind::Bool: return value == 0 || value == 1;
        case FieldKind::Sign: return value == -1 || value == 1;
        case FieldKind::Grid: return value == 0 || value == 1;
    }
    return false;
}

bool StateSchema::validate(const EnvState& state) const {
    if (static_cast<int>(state.slots.size()) != total_slots_) return false;
    for (const auto& f : fields_) {
        for (int i = 0; i < f.slot_count(); ++i)
            if (!slot_in_domain(f, state.slots[static_cast<size_t>(f.offset + i)])) return false;
    }
    return true;
}

std::string StateSchema::validate_message(const EnvState& state) const {
    if (static_cast<int>(state.slots.size()) != total_slots_) {
        std::ostringstream os;
        os << "state has " << state.slots.size() << " slots, schema expects " << total_slots_;
        return os.str();
    }
    for (const auto& f : fields_) {
        for (int i = 0; i < f.slot_count(); ++i) {
            int32_t v = state.slots[static_cast<size_t>(f.offset + i)];
            if (!slot_in_domain(f, v)) {
                std::ostringstream os;
                os << "field " << f.name << " slot " << i << " value " << v << " out of domain";
                return os.str();
            }
        }
    }
    return {};
}

}  // namespace mptcs
