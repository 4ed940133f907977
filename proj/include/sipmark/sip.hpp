#pragma once

#include "sipmark/sip/dump.hpp"
#include "sipmark/sip/permutation.hpp"
#include "sipmark/sip/representations.hpp"
#include "sipmark/sip/rpg.hpp"
