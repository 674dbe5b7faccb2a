#pragma once

// Failure vocabulary shared by the whole library.  Every precondition
// violation throws Error with a reason code; the cli maps codes to exit
// statuses and tests match on them.  errc::internal marks consistency checks
// that can only fire on a library bug, never on bad input.

#include <stdexcept>
#include <string>

namespace bqf {

enum class errc {
    invalid_input,
    invalid_discriminant,
    invalid_form,
    factorization_incomplete,
    context_mismatch,
    not_proper,
    not_nested,
    not_integral,
    not_coprime,
    conductor_prime,
    inert_prime,
    not_conductor_prime,
    odd_inert_exponent,
    search_exhausted,
    unknown_example,
    internal,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_input: return "invalid_input";
        case errc::invalid_discriminant: return "invalid_discriminant";
        case errc::invalid_form: return "invalid_form";
        case errc::factorization_incomplete: return "factorization_incomplete";
        case errc::context_mismatch: return "context_mismatch";
        case errc::not_proper: return "not_proper";
        case errc::not_nested: return "not_nested";
        case errc::not_integral: return "not_integral";
        case errc::not_coprime: return "not_coprime";
        case errc::conductor_prime: return "conductor_prime";
        case errc::inert_prime: return "inert_prime";
        case errc::not_conductor_prime: return "not_conductor_prime";
        case errc::odd_inert_exponent: return "odd_inert_exponent";
        case errc::search_exhausted: return "search_exhausted";
        case errc::unknown_example: return "unknown_example";
        case errc::internal: return "internal";
    }
    return "internal";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

// Consistency check for conditions the library itself guarantees.
inline void check_internal(bool ok, const char* what) {
    if (!ok) fail(errc::internal, what);
}

}  // namespace bqf
