// Copyright 2026 The blobtag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "blobtag/annotation.hpp"
#include "blobtag/clustering.hpp"
#include "blobtag/colorspace.hpp"
#include "blobtag/errors.hpp"
#include "blobtag/evaluation.hpp"
#include "blobtag/manifest.hpp"
#include "blobtag/pipeline.hpp"
#include "blobtag/pixmap.hpp"
#include "blobtag/probability.hpp"
#include "blobtag/segmentation.hpp"
#include "blobtag/store.hpp"
#include "blobtag/synthetic.hpp"
#include "blobtag/vocabulary.hpp"
