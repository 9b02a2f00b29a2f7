#pragma once

#include <array>
#include <string_view>

namespace sentiscore::lexicon {

// Word lists behind the synthetic review generator. The positive and
// negative lists are graded by intensity: window k of kNegativeWindows
// holds the words drawn for score k+1, window k of kPositiveWindows the
// words drawn for score k+2. The common pools are shared across scores
// within a polarity, the filler list across everything.

inline constexpr std::size_t kWindowSize = 6;
inline constexpr std::size_t kWindowCount = 9;

// Scores 1..9, harshest first.
inline constexpr std::array<std::array<std::string_view, kWindowSize>,
                            kWindowCount>
    kNegativeWindows = {{
        {"abysmal", "atrocious", "unwatchable", "horrendous", "excruciating",
         "irredeemable"},
        {"terrible", "awful", "dreadful", "horrible", "wretched",
         "disastrous"},
        {"pathetic", "miserable", "inept", "laughable", "shoddy",
         "amateurish"},
        {"sloppy", "grating", "lifeless", "clunky", "hollow", "cringeworthy"},
        {"boring", "dull", "stale", "tiresome", "plodding", "monotonous"},
        {"disappointing", "mediocre", "underwhelming", "lackluster",
         "shallow", "uninspired"},
        {"uneven", "forgettable", "contrived", "bland", "unconvincing",
         "derivative"},
        {"middling", "unremarkable", "tepid", "routine", "patchy",
         "lukewarm"},
        {"minor", "slight", "occasional", "forgivable", "trivial", "fixable"},
    }};

// Scores 2..10, faintest first.
inline constexpr std::array<std::array<std::string_view, kWindowSize>,
                            kWindowCount>
    kPositiveWindows = {{
        {"tolerable", "watchable", "passable", "bearable", "adequate",
         "acceptable"},
        {"decent", "reasonable", "fair", "serviceable", "respectable",
         "presentable"},
        {"pleasant", "agreeable", "likable", "amiable", "breezy", "tidy"},
        {"solid", "competent", "capable", "steady", "dependable",
         "effective"},
        {"good", "enjoyable", "engaging", "entertaining", "satisfying",
         "charming"},
        {"impressive", "compelling", "polished", "vivid", "sharp",
         "memorable"},
        {"excellent", "superb", "terrific", "striking", "powerful",
         "delightful"},
        {"brilliant", "outstanding", "magnificent", "stunning", "exceptional",
         "dazzling"},
        {"masterpiece", "flawless", "perfect", "sublime", "transcendent",
         "unforgettable"},
    }};

inline constexpr std::array<std::string_view, 10> kPositiveCommon = {
    "great",     "nice",     "love", "loved",     "enjoyed",
    "recommend", "favorite", "fun",  "beautiful", "moving",
};

inline constexpr std::array<std::string_view, 10> kNegativeCommon = {
    "hate",  "hated",    "dislike", "waste",  "regret",
    "avoid", "annoying", "tedious", "dreary", "grim",
};

inline constexpr std::array<std::string_view, 44> kFiller = {
    "the",     "a",         "an",     "this",   "that",    "movie",
    "film",    "story",     "plot",   "scene",  "scenes",  "actor",
    "actors",  "acting",    "director", "script", "dialogue", "music",
    "ending",  "beginning", "character", "characters", "camera", "screen",
    "watch",   "watched",   "see",    "saw",    "one",     "two",
    "with",    "and",       "but",    "very",   "really",  "about",
    "again",   "time",      "night",  "pacing", "tone",    "cast",
    "runtime", "sequel",
};

}  // namespace sentiscore::lexicon
