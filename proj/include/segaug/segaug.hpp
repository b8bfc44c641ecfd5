/*
 * Copyright 2026 The segaug Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEGAUG_SEGAUG_HPP
#define SEGAUG_SEGAUG_HPP

#include "segaug/augment.hpp"
#include "segaug/evaluation.hpp"
#include "segaug/image.hpp"
#include "segaug/losses.hpp"
#include "segaug/manifest.hpp"
#include "segaug/random.hpp"
#include "segaug/sampler.hpp"
#include "segaug/segmentation.hpp"

#endif  // SEGAUG_SEGAUG_HPP
