#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "o3/chor_exec.hpp"
#include "o3/syntax.hpp"
#include "o3/wellformed.hpp"

namespace o3 {

// Canonical, injective text encodings used for state hashing and visited sets.
void encode(std::string& out, const Value& v);
void encode(std::string& out, const Token& t);
void encode(std::string& out, const TokenExpr& t);
void encode(std::string& out, const Expr& e);
void encode(std::string& out, const Choreography& c);
void encode(std::string& out, const ProcessBehavior& p);
/// Encoding of normalize(c), computed without materializing it.
void encode_normal(std::string& out, const Choreography& c);
void encode_normal(std::string& out, const ProcessBehavior& p);
void encode(std::string& out, const ProcState& s);
void encode(std::string& out, const StateMap& sigma);
void encode(std::string& out, const MessageMap& K);

/// Encodes (normalize(C), Σ, K) with every message bag sorted.
std::string canonical(const ChorConfiguration& cfg);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

std::uint64_t state_hash(const ChorConfiguration& cfg);

nlohmann::json to_json(const Value& v);
nlohmann::json to_json(const IntegrityKey& k);
nlohmann::json to_json(const ProcState& s);
nlohmann::json to_json(const WfReport& r);

/// JSON lines: a header object followed by one object per step.
std::string emit_trace_json(const Trace& t, const nlohmann::json& header_extra = nlohmann::json::object());

}  // namespace o3
