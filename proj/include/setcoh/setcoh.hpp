#ifndef SETCOH_SETCOH_HPP
#define SETCOH_SETCOH_HPP

#include "setcoh/error.hpp"
#include "setcoh/logic.hpp"
#include "setcoh/rng.hpp"
#include "setcoh/statement.hpp"
#include "setcoh/rules.hpp"
#include "setcoh/lexicon.hpp"
#include "setcoh/datagen.hpp"
#include "setcoh/jsonl.hpp"
#include "setcoh/tokenizer.hpp"
#include "setcoh/model.hpp"
#include "setcoh/optim.hpp"
#include "setcoh/trainer.hpp"
#include "setcoh/verifier.hpp"
#include "setcoh/evalkit.hpp"

#endif  // SETCOH_SETCOH_HPP
