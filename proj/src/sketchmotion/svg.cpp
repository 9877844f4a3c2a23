// Copyright 2026 The SketchMotion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "sketchmotion/svg.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "sketchmotion/errors.hpp"

namespace sketchmotion {

namespace {

struct Element {
  std::string name;
  std::map<std::string, std::pair<std::string, std::size_t>> attrs;  // value, byte offset
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Minimal tag scanner: yields start/empty tags with attributes, skips
// comments, processing instructions, doctype and text.
std::vector<Element> scan_elements(std::string_view text) {
  std::vector<Element> out;
  std::size_t pos = 0;
  while (true) {
    pos = text.find('<', pos);
    if (pos == std::string_view::npos) break;
    if (text.substr(pos, 4) == "<!--") {
      std::size_t end = text.find("-->", pos + 4);
      if (end == std::string_view::npos) throw ParseError("unterminated comment", pos);
      pos = end + 3;
      continue;
    }
    if (pos + 1 < text.size() && (text[pos + 1] == '?' || text[pos + 1] == '!' || text[pos + 1] == '/')) {
      std::size_t end = text.find('>', pos);
      if (end == std::string_view::npos) throw ParseError("unterminated tag", pos);
      pos = end + 1;
      continue;
    }
    std::size_t i = pos + 1;
    Element el;
    while (i < text.size() && !is_space(text[i]) && text[i] != '>' && text[i] != '/') el.name += text[i++];
    while (true) {
      while (i < text.size() && is_space(text[i])) ++i;
      if (i >= text.size()) throw ParseError("unterminated tag <" + el.name + ">", pos);
      if (text[i] == '>') break;
      if (text[i] == '/') {
        ++i;
        continue;
      }
      std::string key;
      while (i < text.size() && text[i] != '=' && !is_space(text[i]) && text[i] != '>') key += text[i++];
      while (i < text.size() && is_space(text[i])) ++i;
      if (i >= text.size() || text[i] != '=') throw ParseError("attribute '" + key + "' has no value", i);
      ++i;
      while (i < text.size() && is_space(text[i])) ++i;
      if (i >= text.size() || (text[i] != '"' && text[i] != '\'')) {
        throw ParseError("attribute '" + key + "' value is not quoted", i);
      }
      char quote = text[i++];
      std::size_t end = text.find(quote, i);
      if (end == std::string_view::npos) throw ParseError("unterminated attribute value", i);
      el.attrs[key] = {std::string(text.substr(i, end - i)), i};
      i = end + 1;
    }
    out.push_back(std::move(el));
    pos = i + 1;
  }
  return out;
}

class NumberReader {
 public:
  NumberReader(std::string_view s, std::size_t base) : s_(s), base_(base) {}

  void skip_separators() {
    while (pos_ < s_.size() && (is_space(s_[pos_]) || s_[pos_] == ',')) ++pos_;
  }
  bool at_end() {
    skip_separators();
    return pos_ >= s_.size();
  }
  bool next_is_number() {
    skip_separators();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
  std::size_t offset() const { return base_ + pos_; }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }

  double number() {
    skip_separators();
    std::size_t start = pos_;
    std::size_t i = pos_;
    if (i < s_.size() && (s_[i] == '-' || s_[i] == '+')) ++i;
    bool digits = false;
    while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i, digits = true;
    if (i < s_.size() && s_[i] == '.') {
      ++i;
      while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i, digits = true;
    }
    if (!digits) throw ParseError("expected a number", base_ + start);
    if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < s_.size() && (s_[j] == '-' || s_[j] == '+')) ++j;
      if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
        i = j;
        while (i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]))) ++i;
      }
    }
    std::string_view tok = s_.substr(start, i - start);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("malformed number", base_ + start);
    }
    pos_ = i;
    return v;
  }

 private:
  std::string_view s_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

Stroke line_stroke(Point a, Point b, double width) {
  return Stroke{{a, a + (1.0 / 3.0) * (b - a), a + (2.0 / 3.0) * (b - a), b}, width};
}

// Parses one path's d attribute into strokes in user (viewBox) coordinates.
void parse_path_data(std::string_view d, std::size_t base, double width, std::vector<Stroke>& out) {
  NumberReader rd(d, base);
  Point cur{}, start{};
  char cmd = 0;
  bool have_current = false;
  while (!rd.at_end()) {
    if (!rd.next_is_number()) {
      std::size_t at = rd.offset();
      char c = rd.take();
      switch (c) {
        case 'M': case 'm': case 'L': case 'l': case 'H': case 'h':
        case 'V': case 'v': case 'C': case 'c': case 'Z': case 'z':
          cmd = c;
          break;
        default:
          throw ParseError(std::string("unsupported path command '") + c + "'", at);
      }
      if (cmd != 'M' && cmd != 'm' && !have_current) {
        throw ParseError(std::string("path command '") + c + "' before any moveto", at);
      }
      if (cmd == 'Z' || cmd == 'z') {
        if (!(cur == start)) out.push_back(line_stroke(cur, start, width));
        cur = start;
        continue;
      }
    } else if (cmd == 0 || cmd == 'Z' || cmd == 'z') {
      throw ParseError("number without a path command", rd.offset());
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd)) != 0;
    const Point origin = rel ? cur : Point{};
    switch (cmd) {
      case 'M': case 'm': {
        double x = rd.number(), y = rd.number();
        // A relative moveto at the start of a path is absolute.
        cur = have_current ? origin + Point{x, y} : Point{x, y};
        start = cur;
        have_current = true;
        cmd = rel ? 'l' : 'L';  // subsequent pairs are implicit linetos
        break;
      }
      case 'L': case 'l': {
        double x = rd.number(), y = rd.number();
        Point next = origin + Point{x, y};
        out.push_back(line_stroke(cur, next, width));
        cur = next;
        break;
      }
      case 'H': case 'h': {
        double x = rd.number();
        Point next{rel ? cur.x + x : x, cur.y};
        out.push_back(line_stroke(cur, next, width));
        cur = next;
        break;
      }
      case 'V': case 'v': {
        double y = rd.number();
        Point next{cur.x, rel ? cur.y + y : y};
        out.push_back(line_stroke(cur, next, width));
        cur = next;
        break;
      }
      case 'C': case 'c': {
        std::array<double, 6> v{};
        for (double& x : v) x = rd.number();
        Stroke s{{cur, origin + Point{v[0], v[1]}, origin + Point{v[2], v[3]}, origin + Point{v[4], v[5]}}, width};
        out.push_back(s);
        cur = s.points[3];
        break;
      }
      default:
        break;
    }
  }
}

std::optional<double> parse_length(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  while (*b == ' ') ++b;
  auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc()) return std::nullopt;
  std::string_view unit(ptr, s.data() + s.size() - ptr);
  if (!unit.empty() && unit != "px") return std::nullopt;
  return v;
}

double stroke_width_of(const Element& el, double inherited) {
  if (auto it = el.attrs.find("stroke-width"); it != el.attrs.end()) {
    if (auto v = parse_length(it->second.first); v && *v > 0) return *v;
    throw ParseError("invalid stroke-width", it->second.second);
  }
  if (auto it = el.attrs.find("style"); it != el.attrs.end()) {
    const std::string& style = it->second.first;
    std::size_t p = style.find("stroke-width");
    if (p != std::string::npos) {
      std::size_t colon = style.find(':', p);
      std::size_t semi = style.find(';', p);
      if (colon != std::string::npos) {
        std::string value = style.substr(colon + 1, semi == std::string::npos ? std::string::npos : semi - colon - 1);
        if (auto v = parse_length(value); v && *v > 0) return *v;
      }
    }
  }
  return inherited;
}

void append_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Sketch parse_svg(std::string_view text) {
  std::vector<Element> elements = scan_elements(text);
  std::array<double, 4> view{0, 0, 0, 0};
  bool have_view = false;
  std::optional<double> width, height;
  double default_stroke = kDefaultStrokeWidth;

  std::vector<Stroke> strokes;
  bool any_path = false;
  for (const Element& el : elements) {
    if (el.name == "svg") {
      if (auto it = el.attrs.find("viewBox"); it != el.attrs.end()) {
        NumberReader rd(it->second.first, it->second.second);
        for (double& v : view) v = rd.number();
        if (!(view[2] > 0 && view[3] > 0)) throw ParseError("viewBox must have positive size", it->second.second);
        have_view = true;
      }
      if (auto it = el.attrs.find("width"); it != el.attrs.end()) width = parse_length(it->second.first);
      if (auto it = el.attrs.find("height"); it != el.attrs.end()) height = parse_length(it->second.first);
      default_stroke = stroke_width_of(el, default_stroke);
    } else if (el.name == "path") {
      auto it = el.attrs.find("d");
      if (it == el.attrs.end()) continue;
      any_path = true;
      parse_path_data(it->second.first, it->second.second, stroke_width_of(el, default_stroke), strokes);
    }
  }
  if (!any_path || strokes.empty()) throw EmptySketchError();

  Canvas canvas;
  canvas.width = static_cast<int>(std::lround(width.value_or(have_view ? view[2] : kDefaultCanvasSize)));
  canvas.height = static_cast<int>(std::lround(height.value_or(have_view ? view[3] : kDefaultCanvasSize)));
  if (canvas.width <= 0 || canvas.height <= 0) throw ParseError("canvas size must be positive");
  if (have_view) {
    const double sx = canvas.width / view[2];
    const double sy = canvas.height / view[3];
    if (sx != 1.0 || sy != 1.0 || view[0] != 0.0 || view[1] != 0.0) {
      for (Stroke& s : strokes) {
        for (Point& p : s.points) p = {(p.x - view[0]) * sx, (p.y - view[1]) * sy};
        s.width *= std::sqrt(sx * sy);
      }
    }
  }
  return Sketch(std::move(strokes), canvas);
}

Sketch load_svg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_svg(ss.str());
}

std::string write_svg(const Sketch& sketch) {
  const Canvas c = sketch.canvas();
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(c.width) +
                    "\" height=\"" + std::to_string(c.height) + "\" viewBox=\"0 0 " +
                    std::to_string(c.width) + " " + std::to_string(c.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Stroke& s : sketch.strokes()) {
    out += "<path d=\"M ";
    append_number(out, s.points[0].x);
    out += ' ';
    append_number(out, s.points[0].y);
    out += " C";
    for (int k = 1; k < 4; ++k) {
      out += ' ';
      append_number(out, s.points[k].x);
      out += ' ';
      append_number(out, s.points[k].y);
    }
    out += "\" fill=\"none\" stroke=\"black\" stroke-linecap=\"round\" stroke-width=\"";
    append_number(out, s.width);
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void save_svg(const Sketch& sketch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << write_svg(sketch);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sketchmotion
