#pragma once

#include "delib/errors.hpp"
#include "delib/network.hpp"
#include "delib/cutset.hpp"
#include "delib/enumeration.hpp"
#include "delib/elimination.hpp"
#include "delib/bounded_conditioning.hpp"
#include "delib/utility.hpp"
#include "delib/decision.hpp"
#include "delib/meta.hpp"
#include "delib/problem.hpp"
#include "delib/controller.hpp"
#include "delib/io/lexer.hpp"
#include "delib/io/network_text.hpp"
#include "delib/io/problem_text.hpp"
#include "delib/io/trace.hpp"
