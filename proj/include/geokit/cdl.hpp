#pragma once

#include "geokit/cdl/ast.hpp"
#include "geokit/cdl/canonicalize.hpp"
#include "geokit/cdl/json_ast.hpp"
#include "geokit/cdl/parser.hpp"
