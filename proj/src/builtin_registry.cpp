#include "mcode/registry.hpp"

#include <string>
#include <vector>
#include <string_view>

namespace mcode {
namespace {

struct Row {
  std::string_view code;
  std::vector<std::string_view> labels;
};

}  // namespace

LabelRegistry builtin_registry() {
  const Row rows[] = {
      {"000000000001000001", {"pour"}},
      {"000000010100000001", {"sprinkle"}},
      {"100000000100000000", {"poke", "press (button)", "tap"}},
      {"101000000000000000", {"grasp", "hold"}},
      {"101000000001000010", {"open (jar)", "close (jar)", "rotate", "turn (key, knob)", "twist"}},
      {"101000000100000001", {"spread", "wipe"}},
      {"101000000100001000", {"move", "push (rigid)"}},
      {"101000000101001010", {"flip (hand)"}},
      {"101000000101001011", {"flip (turner, spatula)"}},
      {"101000001000000001", {"spread (surface)", "wipe (surface)"}},
      {"101000001000000010", {"open (door)", "close (door)"}},
      {"101000001000010000", {"move (2D)", "insert (placing)", "pick-and-place"}},
      {"101000010001100011", {"fasten (screw)", "loosen (screw)"}},
      {"101000010001100010", {"shake (revolute)"}},
      {"101000010100101000", {"shake (prismatic)"}},
      {"110001000100000001", {"dip"}},
      {"110001000101001001", {"scoop (liquid)"}},
      {"110001100101001001", {"scoop"}},
      {"110110000100000001", {"crack (egg)"}},
      {"111000000100000001", {"insert", "pierce"}},
      {"111001000000000000", {"squeeze (in hand, elastic)"}},
      {"111001000101001010", {"fold", "unwrap", "wrap"}},
      {"111001011000000001", {"beat (liquid)", "mix (liquid)", "stir (liquid)"}},
      {"111001100000000000", {"squeeze (in hand)"}},
      {"111001100100001000", {"flatten", "press", "squeeze", "pull apart", "peel (hand)"}},
      {"111001100100000001", {"chop", "cut", "mash", "peel", "scrape", "shave", "slice"}},
      {"111001100100100010", {"roll"}},
      {"111001101000000001", {"saw", "cut (2D)", "slice (2D)"}},
      {"111001111000000001", {"beat", "mix", "stir"}},
      {"111100000100001001", {"brush", "sweep", "spread (brush)"}},
      {"111100001000010001", {"brush (surface)", "sweep (surface)"}},
      {"111110000000001001", {"grate"}},
  };
  LabelRegistry registry;
  for (const Row& row : rows) {
    const MotionCode code = parse_code(row.code);
    for (std::string_view label : row.labels) registry.add(std::string(label), code);
  }
  return registry;
}

}  // namespace mcode
