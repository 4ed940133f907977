#pragma once

#include "sipmark/watermark/grid.hpp"
#include "sipmark/watermark/report.hpp"
#include "sipmark/watermark/selftest.hpp"
#include "sipmark/watermark/spacing.hpp"
#include "sipmark/watermark/structure.hpp"
