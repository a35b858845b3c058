#include "campl/value.hpp"

namespace campl {

namespace {

std::string quote(const std::string& s, char delim) {
  std::string out(1, delim);
  for (char c : s) {
    if (c == '\n')
      out += "\\n";
    else if (c == '\t')
      out += "\\t";
    else if (c == '\\' || c == delim)
      out += std::string("\\") + c;
    else
      out += c;
  }
  return out + delim;
}

}  // namespace

std::string render(const Value& v) {
  return std::visit(overloaded{
                        [](std::int64_t i) { return std::to_string(i); },
                        [](char c) { return quote(std::string(1, c), '\''); },
                        [](const std::string& s) { return quote(s, '"'); },
                        [](bool b) { return std::string(b ? "True" : "False"); },
                        [](const StoredProc& p) {
                          return "store(" + (p.name.empty() ? std::string("proc") : p.name) + ")";
                        },
                    },
                    v.data);
}

std::string display(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  return render(v);
}

Message Message::val(Value v) {
  Message m;
  m.kind = Kind::Val;
  m.value = std::move(v);
  return m;
}

Message Message::handle_of(std::string h) {
  Message m;
  m.kind = Kind::Handle;
  m.handle = std::move(h);
  return m;
}

Message Message::close() {
  Message m;
  m.kind = Kind::Close;
  return m;
}

Message Message::rewire(int a, int b) {
  Message m;
  m.kind = Kind::Rewire;
  m.first = a;
  m.second = b;
  return m;
}

std::string render(const Message& m) {
  switch (m.kind) {
    case Message::Kind::Val: return render(m.value);
    case Message::Kind::Handle: return m.handle;
    case Message::Kind::Close: return "close";
    case Message::Kind::Rewire:
      return "rewire(#" + std::to_string(m.first) + ",#" + std::to_string(m.second) + ")";
  }
  return {};
}

}  // namespace campl
