// Copyright 2026 The UCO Authors.
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

#include "uco/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <set>

#include "uco/error.hpp"
#include "uco/random.hpp"

namespace uco {
namespace {

constexpr const char* kBrands[] = {
    "creality", "anycubic", "mattel",  "dell",     "asus",    "lenovo",   "samsung",  "apple",    "sony",
    "canon",    "nikon",    "logitech", "razer",   "corsair", "bosch",    "makita",   "dewalt",   "lego",
    "hasbro",   "nike",     "adidas",  "puma",     "fossil",  "casio",    "seiko",    "garmin",   "fitbit",
    "philips",  "dyson",    "kitchenaid", "lodge", "yeti",    "thermos",  "coleman",  "trek",     "shimano",
    "fender",   "yamaha",   "roland",  "gibson",   "nintendo", "sega",    "acer",     "msi",      "gigabyte",
    "kingston", "sandisk",  "seagate", "bose",     "jbl",     "sennheiser", "gopro",  "dji",      "brother",
    "singer",   "celestron", "pelican", "osprey",  "salomon", "breville"};

constexpr const char* kProducts[] = {
    "3d printer",      "gaming monitor",  "laptop",          "fashion doll",   "model car",
    "drone",           "action camera",   "mechanical keyboard", "wireless mouse", "smart watch",
    "road bike",       "electric guitar", "digital piano",   "coffee maker",   "stand mixer",
    "cordless drill",  "robot vacuum",    "bluetooth speaker", "headphones",   "tablet",
    "game console",    "graphics card",   "external ssd",    "dslr camera",    "camping tent",
    "sleeping bag",    "running shoes",   "hiking backpack", "cast iron skillet", "air fryer",
    "electric toothbrush", "hair dryer",  "power bank",      "smartphone",     "ebook reader",
    "projector",       "soundbar",        "wifi router",     "security camera", "sewing machine",
    "telescope",       "microscope",      "kayak",           "skateboard",     "treadmill",
    "office chair",    "desk lamp",       "vacuum flask",    "building set",   "board game"};

// Words describing the item itself: sizes, conditions, editions.
constexpr const char* kProductAttrs[] = {
    "new",      "genuine",  "original", "sealed",    "boxed",     "edition",  "black",    "white",
    "silver",   "red",      "blue",     "pro",       "max",       "plus",     "ultra",    "lite",
    "mini",     "128gb",    "256gb",    "1tb",       "27in",      "24in",     "4k",       "hd",
    "wireless", "portable", "professional", "premium", "upgraded", "v2",      "series",   "complete",
    "full",     "size",     "warranty", "tested",    "working",   "authentic", "official", "limited",
    "deluxe",   "model",    "2023",     "2024",      "unit",      "factory",  "certified", "refurbished"};

// Words describing after-market parts and add-ons.
constexpr const char* kPartAttrs[] = {"oem",   "generic", "aftermarket", "universal", "pack",  "2pcs",
                                      "set",   "lot",     "compatible",  "fits",      "only",  "accessory",
                                      "spare", "diy",     "kit",         "bulk",      "clear", "black"};

constexpr const char* kGenerationWords[] = {"classic", "signature", "studio", "elite", "essential", "heritage"};

constexpr const char* kLetters = "ABCDEFGHJKLMNPQRSTUVWXYZ";
constexpr const char* kDigits = "0123456789";

template <std::size_t N>
std::span<const char* const> span_of(const char* const (&a)[N]) {
  return {a, N};
}

std::string title_case(const std::string& s) {
  std::string out = s;
  bool start = true;
  for (char& c : out) {
    if (start && std::isalpha(static_cast<unsigned char>(c))) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    start = c == ' ';
  }
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

class Builder {
 public:
  Builder(const GenConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {}

  std::string attr() { return rng_.pick(span_of(kProductAttrs)); }
  std::string part_attr() { return rng_.pick(span_of(kPartAttrs)); }
  std::string noise() { return cfg_.noise_word_pool[rng_.below(cfg_.noise_word_pool.size())]; }

  std::vector<std::string> attrs(int lo, int hi) {
    const int n = lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1)));
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(attr());
    return out;
  }

  // Central product listing: the query string plus item attributes.
  std::string positive(const std::string& query) {
    auto words = attrs(3, 5);
    const std::size_t at = rng_.below(2);  // query at the start or after the first attribute
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), title_case(query));
    return join(words);
  }

  // Accessory listing that embeds the contiguous query string.
  std::string common_negative(const std::string& brand, const std::string& product) {
    const std::string q = title_case(brand + " " + product);
    switch (rng_.below(3)) {
      case 0:
        return join({q, noise(), part_attr()});
      case 1:
        return join({noise(), "for", q, part_attr()});
      default:
        return join({part_attr(), noise(), q});
    }
  }

  // Accessory listing reusing the query words without the contiguous query string.
  std::string split_negative(const std::string& brand, const std::string& product) {
    const std::string b = title_case(brand);
    const std::string p = title_case(product);
    switch (rng_.below(3)) {
      case 0:
        return join({p, noise(), part_attr(), "fits", b});
      case 1:
        return join({noise(), part_attr(), "for", p, "by", b});
      default:
        return join({b, noise(), part_attr(), p});
    }
  }

 private:
  const GenConfig& cfg_;
  Rng& rng_;
};

std::string make_code(Rng& rng) {
  std::string code;
  const int prefix = 1 + static_cast<int>(rng.below(2));
  const int digits = 3 + static_cast<int>(rng.below(2));
  const int suffix = 1 + static_cast<int>(rng.below(2));
  for (int i = 0; i < prefix; ++i) code += kLetters[rng.below(24)];
  for (int i = 0; i < digits; ++i) code += kDigits[rng.below(10)];
  for (int i = 0; i < suffix; ++i) code += kLetters[rng.below(24)];
  return code;
}

// One character replaced by another of the same class (letter/digit).
std::string mutate_code(const std::string& code, Rng& rng) {
  std::string out = code;
  const std::size_t at = rng.below(code.size());
  const bool digit = std::isdigit(static_cast<unsigned char>(code[at])) != 0;
  const char* alphabet = digit ? kDigits : kLetters;
  const std::size_t size = digit ? 10 : 24;
  do {
    out[at] = alphabet[rng.below(size)];
  } while (out[at] == code[at]);
  return out;
}

}  // namespace

std::vector<std::string> default_noise_words() {
  return {"cover",  "case",    "charger", "cable",  "strap",   "filament", "shoes",   "stand",   "mount",
          "screen protector",  "replacement part", "bag",  "sticker", "decal",   "manual",  "empty box",
          "nozzle", "battery", "adapter", "remote", "lens cap", "skin",   "holder",  "clip",    "bracket",
          "sleeve", "pouch",   "knob",    "bulb",   "belt"};
}

void validate(const GenConfig& cfg) {
  if (cfg.n_queries < 1) throw ValidationError("n_queries must be at least 1");
  if (cfg.titles_per_query < 2) throw ValidationError("titles_per_query must be at least 2");
  if (cfg.frac_common_str < 0 || cfg.frac_common_str > 1 || cfg.frac_alphanum < 0 || cfg.frac_alphanum > 1) {
    throw ValidationError("fractions must lie in [0, 1]");
  }
  if (cfg.frac_common_str + cfg.frac_alphanum > 1.0 + 1e-12) throw ValidationError("fractions must sum to at most 1");
  if (cfg.noise_word_pool.empty()) throw ValidationError("noise_word_pool must not be empty");
  for (const auto& w : cfg.noise_word_pool) validate_text_field(w, "noise word");
}

std::vector<GradedPair> generate(const GenConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.rng_seed, "synthgen"));
  const auto n = static_cast<std::size_t>(cfg.n_queries);

  const auto n_common = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(cfg.frac_common_str * static_cast<double>(n))));
  const auto n_alpha = std::min<std::size_t>(n - n_common, static_cast<std::size_t>(std::llround(cfg.frac_alphanum * static_cast<double>(n))));
  std::vector<QueryKind> kinds(n, QueryKind::kPlain);
  std::fill_n(kinds.begin(), n_common, QueryKind::kCommonStr);
  std::fill_n(kinds.begin() + static_cast<std::ptrdiff_t>(n_common), n_alpha, QueryKind::kAlphanum);
  rng.shuffle(std::span<QueryKind>(kinds));

  // (brand, product) combinations drawn without replacement; wraps with a generation word.
  const std::size_t n_brands = std::size(kBrands);
  const std::size_t n_products = std::size(kProducts);
  std::vector<std::size_t> combos(n_brands * n_products);
  std::iota(combos.begin(), combos.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(combos));
  std::size_t next_combo = 0;
  std::set<std::string> codes;

  Builder build(cfg, rng);
  const int n_neg = cfg.titles_per_query / 2;
  const int n_pos = cfg.titles_per_query - n_neg;
  std::vector<GradedPair> pairs;
  pairs.reserve(n * static_cast<std::size_t>(cfg.titles_per_query));
  std::size_t title_counter = 0;
  char buf[32];

  for (std::size_t qi = 0; qi < n; ++qi) {
    std::snprintf(buf, sizeof buf, "q%06zu", qi + 1);
    const std::string qid = cfg.id_prefix + buf;
    auto emit = [&](const std::string& query, const std::string& title, bool central) {
      std::snprintf(buf, sizeof buf, "t%07zu", ++title_counter);
      pairs.push_back({qid, query, cfg.id_prefix + buf, title, central ? 4 : 2, central ? 1 : 0});
    };

    if (kinds[qi] == QueryKind::kAlphanum) {
      std::string code;
      do {
        code = make_code(rng);
      } while (!codes.insert(code).second);
      const std::string brand = title_case(rng.pick(span_of(kBrands)));
      const std::string product = title_case(rng.pick(span_of(kProducts)));
      for (int i = 0; i < n_pos; ++i) emit(code, join({brand, code, product, build.attr(), build.attr()}), true);
      std::set<std::string> used{code};
      for (int i = 0; i < n_neg; ++i) {
        std::string near;
        do {
          near = mutate_code(code, rng);
        } while (!used.insert(near).second && used.size() < 64);
        emit(code, join({brand, near, product, build.attr(), build.attr()}), false);
      }
      continue;
    }

    const std::size_t c = combos[next_combo % combos.size()];
    const std::size_t generation = next_combo / combos.size();
    ++next_combo;
    const std::string brand = kBrands[c / n_products];
    std::string product = kProducts[c % n_products];
    if (generation > 0) {
      product += std::string(" ") + kGenerationWords[(generation - 1) % std::size(kGenerationWords)];
      for (std::size_t g = (generation - 1) / std::size(kGenerationWords); g > 0; g /= std::size(kGenerationWords)) {
        product += std::string(" ") + kGenerationWords[g % std::size(kGenerationWords)];
      }
    }
    const std::string query = brand + " " + product;
    for (int i = 0; i < n_pos; ++i) emit(query, build.positive(query), true);
    for (int i = 0; i < n_neg; ++i) {
      emit(query, kinds[qi] == QueryKind::kCommonStr ? build.common_negative(brand, product)
                                                       : build.split_negative(brand, product),
           false);
    }
  }
  return pairs;
}

}  // namespace uco
