#include "campl/diagnostics.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace campl {

std::string_view to_string(DiagKind k) {
  switch (k) {
    case DiagKind::LexError: return "LexError";
    case DiagKind::ParseError: return "ParseError";
    case DiagKind::PolarityViolation: return "PolarityViolation";
    case DiagKind::IllegalCommand: return "IllegalCommand";
    case DiagKind::LinearityDrop: return "LinearityDrop";
    case DiagKind::LinearityReuse: return "LinearityReuse";
    case DiagKind::PlugCycle: return "PlugCycle";
    case DiagKind::PlugPolarityMismatch: return "PlugPolarityMismatch";
    case DiagKind::HandleUnknown: return "HandleUnknown";
    case DiagKind::HandleDuplicate: return "HandleDuplicate";
    case DiagKind::RaceArmNotReceiving: return "RaceArmNotReceiving";
    case DiagKind::HaltNotLast: return "HaltNotLast";
    case DiagKind::SeqMismatch: return "SeqMismatch";
    case DiagKind::UnificationFailure: return "UnificationFailure";
    case DiagKind::ArityMismatch: return "ArityMismatch";
    case DiagKind::UnknownName: return "UnknownName";
    case DiagKind::DuplicateDefinition: return "DuplicateDefinition";
    case DiagKind::Warning: return "warning";
  }
  return "?";
}

std::string format_text(const Diagnostic& d, std::string_view file) {
  std::ostringstream os;
  os << file << ':' << d.pos.line << ':' << d.pos.column << ": " << to_string(d.kind) << ": "
     << d.message;
  return os.str();
}

std::string format_json(const Diagnostic& d, std::string_view file) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(d.kind);
  j["file"] = file;
  j["line"] = d.pos.line;
  j["column"] = d.pos.column;
  j["message"] = d.message;
  j["channel"] = d.channel.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(d.channel);
  j["type"] = d.type.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(d.type);
  return j.dump();
}

void sort_by_position(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.pos.line != b.pos.line) return a.pos.line < b.pos.line;
    return a.pos.column < b.pos.column;
  });
}

}  // namespace campl
