#pragma once
// ecsq.hpp — umbrella header.

#include "ecsq/certificate.hpp"
#include "ecsq/fft.hpp"
#include "ecsq/geometry.hpp"
#include "ecsq/groupg.hpp"
#include "ecsq/odespace.hpp"
#include "ecsq/periodic.hpp"
#include "ecsq/pipeline.hpp"
#include "ecsq/septuple.hpp"
#include "ecsq/specsolve.hpp"
#include "ecsq/tolerances.hpp"
