#pragma once

// Umbrella header: the full plate-ranging toolkit.

#include "lpr/contours.hpp"
#include "lpr/detection.hpp"
#include "lpr/edges.hpp"
#include "lpr/flow.hpp"
#include "lpr/fusion.hpp"
#include "lpr/geometry.hpp"
#include "lpr/homography.hpp"
#include "lpr/hough.hpp"
#include "lpr/io.hpp"
#include "lpr/morphology.hpp"
#include "lpr/pipeline.hpp"
#include "lpr/pose.hpp"
#include "lpr/ranging.hpp"
#include "lpr/raster.hpp"
#include "lpr/resize.hpp"
#include "lpr/segmentation.hpp"
#include "lpr/synth.hpp"
#include "lpr/temporal.hpp"
#include "lpr/threshold.hpp"
