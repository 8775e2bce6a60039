#pragma once

// Morse-decomposed cobordism words on labeled circles, their evaluation
// under a pair, the saddle-exchange diamonds and pole degrees.

#include "frobpair/pair.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace frobpair {

enum class EventKind { birth, death, merge, split, mobius, swap };

struct Event {
  EventKind kind = EventKind::swap;
  std::size_t pos = 1;    // 1-based circle position
  SortWord out;           // merge/mobius: one sort, split: two sorts

  std::string to_string() const;
  friend bool operator==(const Event&, const Event&) = default;
};

struct CobordismWord {
  SortWord input;
  std::vector<Event> events;

  /// Running words: words()[0] is the input, words()[k] follows event k.
  std::vector<SortWord> words() const;
  SortWord output() const;
  std::string to_string() const;  // the text format
};

/// Generator realizing a merge/split/mobius transition; throws
/// "no generator for AA→E" style errors.
std::string generator_for(EventKind kind, const SortWord& in, const SortWord& out);

/// Checks every event against the running word.
void validate(const CobordismWord& w);

CobordismWord parse_cobordism(std::string_view text);
CobordismWord load_cobordism(const std::string& path);

/// `b` after `a`; requires output(a) == input(b).
CobordismWord concat(const CobordismWord& a, const CobordismWord& b);

LinMap evaluate(const CobordismWord& w, const FrobeniusPair& pair);

/// The interacting two-band configurations of the band model: each case
/// lists the circles of its four states and the band moves between them.
struct DiamondCase {
  std::string name;
  std::string description;
};
const std::vector<DiamondCase>& diamond_cases();

/// For every case and every legal sort labeling, compares the two orders of
/// the saddles. Reported like verify: group = case, name = labeling.
VerifyReport diamond_exchange_suite(const FrobeniusPair& pair);

// ---------------------------------------------------------------------------
// Poles

enum class PoleSide { left, right };
using PoleWord = std::vector<PoleSide>;

/// "+-+-": '+' is left, '-' is right.
PoleWord parse_poles(std::string_view s);
std::string pole_string(const PoleWord& w);

/// Cancels cyclically adjacent same-side poles; half the remaining length.
std::size_t pole_degree(const PoleWord& w);
std::size_t total_degree(const std::vector<PoleWord>& components);
bool is_essential(const std::vector<PoleWord>& components);

}  // namespace frobpair
