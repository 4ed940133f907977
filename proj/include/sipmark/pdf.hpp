#pragma once

#include "sipmark/pdf/content.hpp"
#include "sipmark/pdf/document.hpp"
#include "sipmark/pdf/filters.hpp"
#include "sipmark/pdf/lexer.hpp"
#include "sipmark/pdf/object.hpp"
#include "sipmark/pdf/page_tree.hpp"
#include "sipmark/pdf/parser.hpp"
#include "sipmark/pdf/serializer.hpp"
#include "sipmark/pdf/writer.hpp"
