#ifndef RATIONALIZER_RATIONALIZER_HPP
#define RATIONALIZER_RATIONALIZER_HPP

#include "rationalizer/decimal.hpp"
#include "rationalizer/kano.hpp"
#include "rationalizer/analysis.hpp"
#include "rationalizer/ingest.hpp"
#include "rationalizer/store.hpp"
#include "rationalizer/report.hpp"
#include "rationalizer/service.hpp"

#endif  // RATIONALIZER_RATIONALIZER_HPP
