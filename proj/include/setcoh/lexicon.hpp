#ifndef SETCOH_LEXICON_HPP
#define SETCOH_LEXICON_HPP

// Surface vocabulary for the synthetic corpora.

#include <array>
#include <string_view>

namespace setcoh::lexicon {

struct Subject {
    std::string_view slug;
    std::string_view phrase;
};

inline constexpr std::array<Subject, 40> kSubjects{{
    {"man", "the man"},           {"woman", "the woman"},         {"boy", "the boy"},
    {"girl", "the girl"},         {"chef", "the chef"},           {"nurse", "the nurse"},
    {"farmer", "the farmer"},     {"pilot", "the pilot"},         {"dancer", "the dancer"},
    {"student", "the student"},   {"teacher", "the teacher"},     {"driver", "the driver"},
    {"doctor", "the doctor"},     {"painter", "the painter"},     {"singer", "the singer"},
    {"runner", "the runner"},     {"tourist", "the tourist"},     {"worker", "the worker"},
    {"child", "the child"},       {"couple", "the couple"},       {"baker", "the baker"},
    {"golfer", "the golfer"},     {"surfer", "the surfer"},       {"guard", "the guard"},
    {"clerk", "the clerk"},       {"monk", "the monk"},           {"biker", "the biker"},
    {"skater", "the skater"},     {"fisher", "the fisherman"},    {"player", "the player"},
    {"waiter", "the waiter"},     {"artist", "the artist"},       {"hiker", "the hiker"},
    {"climber", "the climber"},   {"vendor", "the street vendor"}, {"officer", "the police officer"},
    {"toddler", "the toddler"},   {"grandpa", "the old man"},     {"bride", "the bride"},
    {"musician", "the musician"},
}};

// Entailment: "<subject> is <specific>" entails "<subject> is <general>".
struct Specialization {
    std::string_view slug;
    std::string_view specific;
    std::string_view general;
};

inline constexpr std::array<Specialization, 20> kSpecializations{{
    {"walk", "walking through a crowded park", "walking"},
    {"eat", "eating a large sandwich", "eating"},
    {"read", "reading a thick novel", "reading"},
    {"run", "running along the beach", "running"},
    {"sing", "singing on a small stage", "singing"},
    {"cook", "cooking pasta in a kitchen", "cooking"},
    {"ride", "riding a red bicycle", "riding a bicycle"},
    {"swim", "swimming in a cold lake", "swimming"},
    {"write", "writing a letter with a pen", "writing"},
    {"play", "playing guitar on the street", "playing an instrument"},
    {"drink", "drinking hot coffee", "drinking something"},
    {"paint", "painting a portrait of a dog", "painting"},
    {"climb", "climbing a steep rock wall", "climbing"},
    {"dance", "dancing at a wedding", "dancing"},
    {"talk", "talking on a phone", "talking"},
    {"carry", "carrying a heavy box", "carrying something"},
    {"wear", "wearing a bright yellow jacket", "wearing a jacket"},
    {"hold", "holding a sleeping baby", "holding a baby"},
    {"fish", "fishing from a wooden pier", "fishing"},
    {"clean", "cleaning the windows of a car", "cleaning"},
}};

// Contradiction: the second phrase is treated as the negation of the first.
struct Antonym {
    std::string_view slug;
    std::string_view a;
    std::string_view b;
};

inline constexpr std::array<Antonym, 12> kAntonyms{{
    {"sit", "sitting down", "standing up"},
    {"sleep", "sleeping", "wide awake"},
    {"indoors", "indoors", "outdoors"},
    {"alone", "alone", "with a group of friends"},
    {"laugh", "laughing", "crying"},
    {"wet", "soaking wet", "completely dry"},
    {"still", "lying still", "moving around"},
    {"quiet", "silent", "shouting loudly"},
    {"hot", "sweating in the heat", "shivering in the cold"},
    {"early", "arriving early", "arriving late"},
    {"up", "going up the stairs", "going down the stairs"},
    {"open", "opening a door", "closing a door"},
}};

// Independent properties used for neutral pairs.
struct Property {
    std::string_view slug;
    std::string_view phrase;
};

inline constexpr std::array<Property, 14> kProperties{{
    {"smile", "smiling"},
    {"hat", "wearing a hat"},
    {"tired", "tired"},
    {"tall", "tall"},
    {"young", "young"},
    {"glasses", "wearing glasses"},
    {"waiting", "waiting for a friend"},
    {"hungry", "hungry"},
    {"famous", "famous"},
    {"busy", "busy"},
    {"late", "running late for work"},
    {"phone", "looking at a phone"},
    {"music", "listening to music"},
    {"new", "new in town"},
}};

inline constexpr std::array<std::string_view, 40> kObjects{
    "desk",  "chair", "table",  "lamp",     "bottle", "cup",   "bag",    "shirt",  "car",    "bike",
    "door",  "wall",  "sofa",   "bed",      "clock",  "phone", "book",   "hat",    "shoe",   "box",
    "vase",  "plate", "bowl",   "kite",     "ball",   "umbrella", "bench", "fence", "boat",  "truck",
    "bus",   "train", "laptop", "pillow",   "towel",  "curtain", "rug",  "mug",    "jacket", "backpack",
};

inline constexpr std::array<std::string_view, 11> kColors{
    "red", "blue", "green", "yellow", "brown", "black", "white", "pink", "orange", "purple", "gray",
};

inline constexpr std::array<std::string_view, 7> kMaterials{
    "wood", "metal", "plastic", "glass", "stone", "paper", "leather",
};

}  // namespace setcoh::lexicon

#endif  // SETCOH_LEXICON_HPP
