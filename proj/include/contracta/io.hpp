#pragma once

#include <stdexcept>
#include <string>

#include "contracta/channels.hpp"
#include "contracta/reductions.hpp"
#include "contracta/structure.hpp"

namespace contracta {
namespace io {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Channel JSON: either explicit Kraus data
//   {"d_in": 2, "d_out": 2, "kraus": [[[ [re, im], ... ], ... ], ... ]}
// or a gallery reference
//   {"gallery": "amplitude_damping" | "depolarizing" | "counterexample",
//    "params": {...}, "copies": 1}.
KrausChannel channel_from_json(const std::string& text);
KrausChannel channel_from_file(const std::string& path);
std::string channel_to_json(const KrausChannel& ch);

// Subspace JSON: {"p": int, "q": int, "basis": [matrix, ...]}.
structure::OperatorSubspace subspace_from_json(const std::string& text);
std::string subspace_to_json(const structure::OperatorSubspace& s);

// Instance JSON: {"variant": "hermitian" | "commutative", "operators": [...]}
// with matrices for the Hermitian variant and real vectors otherwise.
reductions::GrothendieckInstance instance_from_json(const std::string& text);

// True when the document carries a channel ("kraus" or "gallery" key).
bool looks_like_channel(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace io
}  // namespace contracta
