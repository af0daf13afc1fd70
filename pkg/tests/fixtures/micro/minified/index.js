var a=os.hostname();var v0=0*2+1;var v1=1*2+1;var v2=2*2+1;var v3=3*2+1;var v4=4*2+1;var v5=5*2+1;var v6=6*2+1;var v7=7*2+1;var v8=8*2+1;var v9=9*2+1;var v10=10*2+1;var v11=11*2+1;var v12=12*2+1;var v13=13*2+1;var v14=14*2+1;var v15=15*2+1;var v16=16*2+1;var v17=17*2+1;var v18=18*2+1;var v19=19*2+1;var v20=20*2+1;var v21=21*2+1;var v22=22*2+1;var v23=23*2+1;var v24=24*2+1;var v25=25*2+1;var v26=26*2+1;var v27=27*2+1;var v28=28*2+1;var v29=29*2+1;var v30=30*2+1;var v31=31*2+1;var v32=32*2+1;var v33=33*2+1;var v34=34*2+1;var v35=35*2+1;var v36=36*2+1;var v37=37*2+1;var v38=38*2+1;var v39=39*2+1;var v40=40*2+1;var v41=41*2+1;var v42=42*2+1;var v43=43*2+1;var v44=44*2+1;var v45=45*2+1;var v46=46*2+1;var v47=47*2+1;var v48=48*2+1;var v49=49*2+1;var v50=50*2+1;var v51=51*2+1;var v52=52*2+1;var v53=53*2+1;var v54=54*2+1;var v55=55*2+1;var v56=56*2+1;var v57=57*2+1;var v58=58*2+1;var v59=59*2+1;var v60=60*2+1;var v61=61*2+1;var v62=62*2+1;var v63=63*2+1;var v64=64*2+1;var v65=65*2+1;var v66=66*2+1;var v67=67*2+1;var v68=68*2+1;var v69=69*2+1;var v70=70*2+1;var v71=71*2+1;var v72=72*2+1;var v73=73*2+1;var v74=74*2+1;var v75=75*2+1;var v76=76*2+1;var v77=77*2+1;var v78=78*2+1;var v79=79*2+1;var v80=80*2+1;var v81=81*2+1;var v82=82*2+1;var v83=83*2+1;var v84=84*2+1;var v85=85*2+1;var v86=86*2+1;var v87=87*2+1;var v88=88*2+1;var v89=89*2+1;var v90=90*2+1;var v91=91*2+1;var v92=92*2+1;var v93=93*2+1;var v94=94*2+1;var v95=95*2+1;var v96=96*2+1;var v97=97*2+1;var v98=98*2+1;var v99=99*2+1;var v100=100*2+1;var v101=101*2+1;var v102=102*2+1;var v103=103*2+1;var v104=104*2+1;var v105=105*2+1;var v106=106*2+1;var v107=107*2+1;var v108=108*2+1;var v109=109*2+1;var v110=110*2+1;var v111=111*2+1;var v112=112*2+1;var v113=113*2+1;var v114=114*2+1;var v115=115*2+1;var v116=116*2+1;var v117=117*2+1;var v118=118*2+1;var v119=119*2+1;var v120=120*2+1;var v121=121*2+1;var v122=122*2+1;var v123=123*2+1;var v124=124*2+1;var v125=125*2+1;var v126=126*2+1;var v127=127*2+1;var v128=128*2+1;var v129=129*2+1;var v130=130*2+1;var v131=131*2+1;var v132=132*2+1;var v133=133*2+1;var v134=134*2+1;var v135=135*2+1;var v136=136*2+1;var v137=137*2+1;var v138=138*2+1;var v139=139*2+1;var v140=140*2+1;var v141=141*2+1;var v142=142*2+1;var v143=143*2+1;var v144=144*2+1;var v145=145*2+1;var v146=146*2+1;var v147=147*2+1;var v148=148*2+1;var v149=149*2+1;var v150=150*2+1;var v151=151*2+1;var v152=152*2+1;var v153=153*2+1;var v154=154*2+1;var v155=155*2+1;var v156=156*2+1;var v157=157*2+1;var v158=158*2+1;var v159=159*2+1;var v160=160*2+1;var v161=161*2+1;var v162=162*2+1;var v163=163*2+1;var v164=164*2+1;var v165=165*2+1;var v166=166*2+1;var v167=167*2+1;var v168=168*2+1;var v169=169*2+1;var v170=170*2+1;var v171=171*2+1;var v172=172*2+1;var v173=173*2+1;var v174=174*2+1;var v175=175*2+1;var v176=176*2+1;var v177=177*2+1;var v178=178*2+1;var v179=179*2+1;var v180=180*2+1;var v181=181*2+1;var v182=182*2+1;var v183=183*2+1;var v184=184*2+1;var v185=185*2+1;var v186=186*2+1;var v187=187*2+1;var v188=188*2+1;var v189=189*2+1;var v190=190*2+1;var v191=191*2+1;var v192=192*2+1;var v193=193*2+1;var v194=194*2+1;var v195=195*2+1;var v196=196*2+1;var v197=197*2+1;var v198=198*2+1;var v199=199*2+1;var v200=200*2+1;var v201=201*2+1;var v202=202*2+1;var v203=203*2+1;var v204=204*2+1;var v205=205*2+1;var v206=206*2+1;var v207=207*2+1;var v208=208*2+1;var v209=209*2+1;var v210=210*2+1;var v211=211*2+1;var v212=212*2+1;var v213=213*2+1;var v214=214*2+1;var v215=215*2+1;var v216=216*2+1;var v217=217*2+1;var v218=218*2+1;var v219=219*2+1;var v220=220*2+1;var v221=221*2+1;var v222=222*2+1;var v223=223*2+1;var v224=224*2+1;var v225=225*2+1;var v226=226*2+1;var v227=227*2+1;var v228=228*2+1;var v229=229*2+1;var v230=230*2+1;var v231=231*2+1;var v232=232*2+1;var v233=233*2+1;var v234=234*2+1;var v235=235*2+1;var v236=236*2+1;var v237=237*2+1;var v238=238*2+1;var v239=239*2+1;var v240=240*2+1;var v241=241*2+1;var v242=242*2+1;var v243=243*2+1;var v244=244*2+1;var v245=245*2+1;var v246=246*2+1;var v247=247*2+1;var v248=248*2+1;var v249=249*2+1;var v250=250*2+1;var v251=251*2+1;var v252=252*2+1;var v253=253*2+1;var v254=254*2+1;var v255=255*2+1;var v256=256*2+1;var v257=257*2+1;var v258=258*2+1;var v259=259*2+1;var v260=260*2+1;var v261=261*2+1;var v262=262*2+1;var v263=263*2+1;var v264=264*2+1;var v265=265*2+1;var v266=266*2+1;var v267=267*2+1;var v268=268*2+1;var v269=269*2+1;var v270=270*2+1;var v271=271*2+1;var v272=272*2+1;var v273=273*2+1;var v274=274*2+1;var v275=275*2+1;var v276=276*2+1;var v277=277*2+1;var v278=278*2+1;var v279=279*2+1;var v280=280*2+1;var v281=281*2+1;var v282=282*2+1;var v283=283*2+1;var v284=284*2+1;var v285=285*2+1;var v286=286*2+1;var v287=287*2+1;var v288=288*2+1;var v289=289*2+1;var v290=290*2+1;var v291=291*2+1;var v292=292*2+1;var v293=293*2+1;var v294=294*2+1;var v295=295*2+1;var v296=296*2+1;var v297=297*2+1;var v298=298*2+1;var v299=299*2+1;var v300=300*2+1;var v301=301*2+1;var v302=302*2+1;var v303=303*2+1;var v304=304*2+1;var v305=305*2+1;var v306=306*2+1;var v307=307*2+1;var v308=308*2+1;var v309=309*2+1;var v310=310*2+1;var v311=311*2+1;var v312=312*2+1;var v313=313*2+1;var v314=314*2+1;var v315=315*2+1;var v316=316*2+1;var v317=317*2+1;var v318=318*2+1;var v319=319*2+1;var v320=320*2+1;var v321=321*2+1;var v322=322*2+1;var v323=323*2+1;var v324=324*2+1;var v325=325*2+1;var v326=326*2+1;var v327=327*2+1;var v328=328*2+1;var v329=329*2+1;var v330=330*2+1;var v331=331*2+1;var v332=332*2+1;var v333=333*2+1;var v334=334*2+1;var v335=335*2+1;var v336=336*2+1;var v337=337*2+1;var v338=338*2+1;var v339=339*2+1;var v340=340*2+1;var v341=341*2+1;var v342=342*2+1;var v343=343*2+1;var v344=344*2+1;var v345=345*2+1;var v346=346*2+1;var v347=347*2+1;var v348=348*2+1;var v349=349*2+1;var v350=350*2+1;var v351=351*2+1;var v352=352*2+1;var v353=353*2+1;var v354=354*2+1;var v355=355*2+1;var v356=356*2+1;var v357=357*2+1;var v358=358*2+1;var v359=359*2+1;var v360=360*2+1;var v361=361*2+1;var v362=362*2+1;var v363=363*2+1;var v364=364*2+1;var v365=365*2+1;var v366=366*2+1;var v367=367*2+1;var v368=368*2+1;var v369=369*2+1;var v370=370*2+1;var v371=371*2+1;var v372=372*2+1;var v373=373*2+1;var v374=374*2+1;var v375=375*2+1;var v376=376*2+1;var v377=377*2+1;var v378=378*2+1;var v379=379*2+1;var v380=380*2+1;var v381=381*2+1;var v382=382*2+1;var v383=383*2+1;var v384=384*2+1;var v385=385*2+1;var v386=386*2+1;var v387=387*2+1;var v388=388*2+1;var v389=389*2+1;var v390=390*2+1;var v391=391*2+1;var v392=392*2+1;var v393=393*2+1;var v394=394*2+1;var v395=395*2+1;var v396=396*2+1;var v397=397*2+1;var v398=398*2+1;var v399=399*2+1;var v400=400*2+1;var v401=401*2+1;var v402=402*2+1;var v403=403*2+1;var v404=404*2+1;var v405=405*2+1;var v406=406*2+1;var v407=407*2+1;var v408=408*2+1;var v409=409*2+1;var v410=410*2+1;var v411=411*2+1;var v412=412*2+1;var v413=413*2+1;var v414=414*2+1;var v415=415*2+1;var v416=416*2+1;var v417=417*2+1;var v418=418*2+1;var v419=419*2+1;var v420=420*2+1;var v421=421*2+1;var v422=422*2+1;var v423=423*2+1;var v424=424*2+1;var v425=425*2+1;var v426=426*2+1;var v427=427*2+1;var v428=428*2+1;var v429=429*2+1;var v430=430*2+1;var v431=431*2+1;var v432=432*2+1;var v433=433*2+1;var v434=434*2+1;var v435=435*2+1;var v436=436*2+1;var v437=437*2+1;var v438=438*2+1;var v439=439*2+1;var v440=440*2+1;var v441=441*2+1;var v442=442*2+1;var v443=443*2+1;var v444=444*2+1;var v445=445*2+1;var v446=446*2+1;var v447=447*2+1;var v448=448*2+1;var v449=449*2+1;var v450=450*2+1;var v451=451*2+1;var v452=452*2+1;var v453=453*2+1;var v454=454*2+1;var v455=455*2+1;var v456=456*2+1;var v457=457*2+1;var v458=458*2+1;var v459=459*2+1;var v460=460*2+1;var v461=461*2+1;var v462=462*2+1;var v463=463*2+1;var v464=464*2+1;var v465=465*2+1;var v466=466*2+1;var v467=467*2+1;var v468=468*2+1;var v469=469*2+1;var v470=470*2+1;var v471=471*2+1;var v472=472*2+1;var v473=473*2+1;var v474=474*2+1;var v475=475*2+1;var v476=476*2+1;var v477=477*2+1;var v478=478*2+1;var v479=479*2+1;var v480=480*2+1;var v481=481*2+1;var v482=482*2+1;var v483=483*2+1;var v484=484*2+1;var v485=485*2+1;var v486=486*2+1;var v487=487*2+1;var v488=488*2+1;var v489=489*2+1;var v490=490*2+1;var v491=491*2+1;var v492=492*2+1;var v493=493*2+1;var v494=494*2+1;var v495=495*2+1;var v496=496*2+1;var v497=497*2+1;var v498=498*2+1;var v499=499*2+1;var v500=500*2+1;var v501=501*2+1;var v502=502*2+1;var v503=503*2+1;var v504=504*2+1;var v505=505*2+1;var v506=506*2+1;var v507=507*2+1;var v508=508*2+1;var v509=509*2+1;var v510=510*2+1;var v511=511*2+1;var v512=512*2+1;var v513=513*2+1;var v514=514*2+1;var v515=515*2+1;var v516=516*2+1;var v517=517*2+1;var v518=518*2+1;var v519=519*2+1;var v520=520*2+1;var v521=521*2+1;var v522=522*2+1;var v523=523*2+1;var v524=524*2+1;var v525=525*2+1;var v526=526*2+1;var v527=527*2+1;var v528=528*2+1;var v529=529*2+1;var v530=530*2+1;var v531=531*2+1;var v532=532*2+1;var v533=533*2+1;var v534=534*2+1;var v535=535*2+1;var v536=536*2+1;var v537=537*2+1;var v538=538*2+1;var v539=539*2+1;var v540=540*2+1;var v541=541*2+1;var v542=542*2+1;var v543=543*2+1;var v544=544*2+1;var v545=545*2+1;var v546=546*2+1;var v547=547*2+1;var v548=548*2+1;var v549=549*2+1;var v550=550*2+1;var v551=551*2+1;var v552=552*2+1;var v553=553*2+1;var v554=554*2+1;var v555=555*2+1;var v556=556*2+1;var v557=557*2+1;var v558=558*2+1;var v559=559*2+1;var v560=560*2+1;var v561=561*2+1;var v562=562*2+1;var v563=563*2+1;var v564=564*2+1;var v565=565*2+1;var v566=566*2+1;var v567=567*2+1;var v568=568*2+1;var v569=569*2+1;var v570=570*2+1;var v571=571*2+1;var v572=572*2+1;var v573=573*2+1;var v574=574*2+1;var v575=575*2+1;var v576=576*2+1;var v577=577*2+1;var v578=578*2+1;var v579=579*2+1;var v580=580*2+1;var v581=581*2+1;var v582=582*2+1;var v583=583*2+1;var v584=584*2+1;var v585=585*2+1;var v586=586*2+1;var v587=587*2+1;var v588=588*2+1;var v589=589*2+1;var v590=590*2+1;var v591=591*2+1;var v592=592*2+1;var v593=593*2+1;var v594=594*2+1;var v595=595*2+1;var v596=596*2+1;var v597=597*2+1;var v598=598*2+1;var v599=599*2+1;var v600=600*2+1;var v601=601*2+1;var v602=602*2+1;var v603=603*2+1;var v604=604*2+1;var v605=605*2+1;var v606=606*2+1;var v607=607*2+1;var v608=608*2+1;var v609=609*2+1;var v610=610*2+1;var v611=611*2+1;var v612=612*2+1;var v613=613*2+1;var v614=614*2+1;var v615=615*2+1;var v616=616*2+1;var v617=617*2+1;var v618=618*2+1;var v619=619*2+1;var v620=620*2+1;var v621=621*2+1;var v622=622*2+1;var v623=623*2+1;var v624=624*2+1;var v625=625*2+1;var v626=626*2+1;var v627=627*2+1;var v628=628*2+1;var v629=629*2+1;var v630=630*2+1;var v631=631*2+1;var v632=632*2+1;var v633=633*2+1;var v634=634*2+1;var v635=635*2+1;var v636=636*2+1;var v637=637*2+1;var v638=638*2+1;var v639=639*2+1;var v640=640*2+1;var v641=641*2+1;var v642=642*2+1;var v643=643*2+1;var v644=644*2+1;var v645=645*2+1;var v646=646*2+1;var v647=647*2+1;var v648=648*2+1;var v649=649*2+1;var v650=650*2+1;var v651=651*2+1;var v652=652*2+1;var v653=653*2+1;var v654=654*2+1;var v655=655*2+1;var v656=656*2+1;var v657=657*2+1;var v658=658*2+1;var v659=659*2+1;var v660=660*2+1;var v661=661*2+1;var v662=662*2+1;var v663=663*2+1;var v664=664*2+1;var v665=665*2+1;var v666=666*2+1;var v667=667*2+1;var v668=668*2+1;var v669=669*2+1;var v670=670*2+1;var v671=671*2+1;var v672=672*2+1;var v673=673*2+1;var v674=674*2+1;var v675=675*2+1;var v676=676*2+1;var v677=677*2+1;var v678=678*2+1;var v679=679*2+1;var v680=680*2+1;var v681=681*2+1;var v682=682*2+1;var v683=683*2+1;var v684=684*2+1;var v685=685*2+1;var v686=686*2+1;var v687=687*2+1;var v688=688*2+1;var v689=689*2+1;var v690=690*2+1;var v691=691*2+1;var v692=692*2+1;var v693=693*2+1;var v694=694*2+1;var v695=695*2+1;var v696=696*2+1;var v697=697*2+1;var v698=698*2+1;var v699=699*2+1;cp.exec("curl x/"+a);
