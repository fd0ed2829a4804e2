fn main() {
    std::process::exit(gsp4_ssc::cli::main_with_args(std::env::args_os()));
}
